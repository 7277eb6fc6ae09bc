#pragma once

// Brute-force finite-difference solution of the full value-function PDE
//     h_t + eps L0 h - lambda phi(nu)^2 + (2h + eta_per)^2 / (4 eta_tem) = 0,
//     h(T-, nu) = -K,
// used as ground truth for the asymptotic expansion. Backward Strang splitting:
// half step of the pointwise Riccati flow (solved exactly), a Crank-Nicolson
// step of eps L0, another half Riccati step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "liquidation/constant_vol.hpp"
#include "liquidation/errors.hpp"
#include "liquidation/quadrature.hpp"
#include "liquidation/stoch_vol.hpp"

namespace liquidation {

struct PdeGridSpec {
    std::size_t t_steps = 1000;
    double nu_step = 0.02;
    double half_width = 0.0;  // 0 = automatic, from the transition law over [0,T]
};

struct PdeGridSolution {
    std::vector<double> t;                // ascending, t.back() = T
    std::vector<double> nu;               // ascending, uniform
    std::vector<std::vector<double>> h;   // h[k][j] at (t[k], nu[j])
    std::size_t steps = 0;
    std::string scheme = "strang: exact riccati half-steps + crank-nicolson generator";
    std::string boundary = "one-sided drift, zero second derivative";

    double at(std::size_t time_index, double x) const {
        return quad::interp_uniform(h.at(time_index), nu.front(), nu[1] - nu[0], x);
    }
    double initial(double x) const { return at(0, x); }
};

namespace detail {

inline double auto_half_width(const StochVolParams& p) {
    const GaussianMoments mo = ou_transition(p.nu0, p.T, p.ou);
    const double sd = std::max(std::sqrt(mo.variance), 0.05);
    return 5.0 * sd + std::abs(mo.mean - p.nu0);
}

// Thomas algorithm; lo[0] and up[n-1] unused.
inline void solve_tridiagonal(std::span<const double> lo, std::span<const double> di, std::span<const double> up,
                              std::span<double> rhs, std::vector<double>& scratch) {
    const std::size_t n = di.size();
    scratch.resize(n);
    double beta = di[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = up[i - 1] / beta;
        beta = di[i] - lo[i] * scratch[i];
        rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

}  // namespace detail

inline PdeGridSolution solve_h_pde(const StochVolParams& p, const PdeGridSpec& spec = {}) {
    p.validate();
    if (spec.t_steps < 1) throw InvalidInput("PDE needs at least one time step");
    if (!(spec.nu_step > 0.0)) throw InvalidInput("PDE nu step must be > 0");
    const double width = spec.half_width > 0.0 ? spec.half_width : detail::auto_half_width(p);
    const auto half = static_cast<std::size_t>(std::ceil(width / spec.nu_step - 1e-9));
    const std::size_t count = 2 * std::max<std::size_t>(half, 1) + 1;
    const double eps = p.ou.epsilon;
    const double diff = 0.5 * p.ou.xi * p.ou.xi;

    PdeGridSolution sol;
    sol.steps = spec.t_steps;
    sol.nu.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        sol.nu[j] = p.nu0 + spec.nu_step * (static_cast<double>(j) - static_cast<double>(count / 2));
    }
    const double dt = p.T / static_cast<double>(spec.t_steps);
    sol.t.resize(spec.t_steps + 1);
    for (std::size_t k = 0; k <= spec.t_steps; ++k) {
        sol.t[k] = k == spec.t_steps ? p.T : dt * static_cast<double>(k);
    }

    const double a = 1.0 / p.eta_tem;
    const double shift = p.eta_per / 2.0;
    std::vector<double> drive(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double s = p.ou.phi(sol.nu[j]);
        drive[j] = p.lambda * s * s;
    }

    // Generator A = eps L0 on the grid.
    std::vector<double> lo(count, 0.0), di(count, 0.0), up(count, 0.0);
    const double dn = spec.nu_step;
    if (eps > 0.0) {
        double worst_peclet = 0.0;
        for (std::size_t j = 1; j + 1 < count; ++j) {
            const double drift = p.ou.m - sol.nu[j];
            worst_peclet = std::max(worst_peclet, std::abs(drift) * dn);
            lo[j] = eps * (diff / (dn * dn) - drift / (2.0 * dn));
            di[j] = eps * (-2.0 * diff / (dn * dn));
            up[j] = eps * (diff / (dn * dn) + drift / (2.0 * dn));
        }
        if (worst_peclet > 2.0 * diff) {
            throw UnstableScheme("cell Peclet number " + std::to_string(worst_peclet / diff) +
                                 " exceeds 2; refine the nu grid");
        }
        const double d0 = p.ou.m - sol.nu.front();
        di[0] = -eps * d0 / dn;
        up[0] = eps * d0 / dn;
        const double d1 = p.ou.m - sol.nu.back();
        di[count - 1] = eps * d1 / dn;
        lo[count - 1] = -eps * d1 / dn;
    }
    std::vector<double> ilo(count), idi(count), iup(count);
    for (std::size_t j = 0; j < count; ++j) {
        ilo[j] = -0.5 * dt * lo[j];
        idi[j] = 1.0 - 0.5 * dt * di[j];
        iup[j] = -0.5 * dt * up[j];
    }

    const double bound = 10.0 * (p.K + p.eta_per);
    std::vector<double> u(count, shift - p.K), rhs(count), scratch;
    auto riccati_half = [&] {
        for (std::size_t j = 0; j < count; ++j) u[j] = detail::RiccatiFlow(a, drive[j], u[j])(0.5 * dt);
    };
    auto record = [&](std::size_t k) {
        auto& row = sol.h[k];
        row.resize(count);
        for (std::size_t j = 0; j < count; ++j) {
            row[j] = u[j] - shift;
            if (!std::isfinite(row[j]) || std::abs(row[j]) > bound) {
                throw UnstableScheme("|h| = " + std::to_string(std::abs(row[j])) + " at t=" +
                                     std::to_string(sol.t[k]) + ", nu=" + std::to_string(sol.nu[j]));
            }
        }
    };

    sol.h.resize(spec.t_steps + 1);
    record(spec.t_steps);
    for (std::size_t k = spec.t_steps; k-- > 0;) {
        riccati_half();
        if (eps > 0.0) {
            for (std::size_t j = 0; j < count; ++j) {
                double au = di[j] * u[j];
                if (j > 0) au += lo[j] * u[j - 1];
                if (j + 1 < count) au += up[j] * u[j + 1];
                rhs[j] = u[j] + 0.5 * dt * au;
            }
            detail::solve_tridiagonal(ilo, idi, iup, rhs, scratch);
            u.swap(rhs);
        }
        riccati_half();
        record(k);
    }
    return sol;
}

struct ResidualStudy {
    std::vector<double> epsilons;
    std::vector<double> residuals;  // |theta_pde - theta_corrected|
    double slope = 0.0;
};

/// Rate residual of the first-order expansion against the PDE, at t = 0.
inline ResidualStudy residual_order_study(const StochVolParams& base, std::span<const double> epsilons, double nu,
                                          double q, const PdeGridSpec& grid = {}) {
    if (epsilons.size() < 3) throw InvalidInput("residual study needs at least 3 epsilon values");
    ResidualStudy out;
    std::vector<double> log_eps, log_res;
    for (double eps : epsilons) {
        StochVolParams p = base;
        p.ou.epsilon = eps;
        const PdeGridSolution pde = solve_h_pde(p, grid);
        const AsymptoticSolution asym(p);
        const double theta_pde = -(2.0 * pde.initial(nu) + p.eta_per) * q / (2.0 * p.eta_tem);
        const double r = std::abs(theta_pde - asym.theta_corrected(0.0, nu, q));
        out.epsilons.push_back(eps);
        out.residuals.push_back(r);
        if (eps > 0.0 && r > 0.0) {
            log_eps.push_back(std::log(eps));
            log_res.push_back(std::log(r));
        }
    }
    out.slope = log_eps.size() >= 2 ? quad::fit_slope(log_eps, log_res) : 0.0;
    return out;
}

}  // namespace liquidation
