#pragma once

// Risk-neutral single-venue liquidation with a limit-order book: market orders
// only, or market orders combined with unit sell limit orders that fill when a
// buy market order arrives (Poisson rate lambda_M), with adverse selection.
// J(t,q) = f(t) + g(t) q + h(t) q^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liquidation/errors.hpp"
#include "liquidation/quadrature.hpp"

namespace liquidation {

inline double arrival_rate(double A, double kappa, double Delta) {
    if (!(A >= 0.0)) throw InvalidInput("A must be >= 0");
    if (!(kappa >= 0.0)) throw InvalidInput("kappa must be >= 0");
    return A * std::exp(-kappa * Delta);
}

struct LobParams {
    double Q = 100.0;
    double T = 1.0;
    double K = 0.1;
    double eta_tem = 0.01;
    double eta_per = 0.005;
    double sigma = std::numbers::e;
    double S0 = 15.0;
    double lambda = 0.1;  // only used for the reported quadratic-variation penalty
    std::optional<double> lambda_M_direct = 100.0;
    double A = 0.0;
    double kappa = 0.0;
    double Delta = 0.3;
    double eta_u = 0.02;
    double eta_d = 0.02;
    double eta_I = 0.02;
    bool adverse_selection = true;

    double lambda_M() const { return lambda_M_direct ? *lambda_M_direct : arrival_rate(A, kappa, Delta); }

    void validate() const {
        if (!(Q > 0.0)) throw InvalidInput("Q must be > 0");
        if (std::floor(Q) != Q) throw InvalidInput("Q must be a whole number of shares (unit limit-order fills)");
        if (!(T > 0.0)) throw InvalidInput("T must be > 0");
        if (!(K > 0.0)) throw InvalidInput("K must be > 0");
        if (!(eta_tem > 0.0)) throw NonpositiveImpact("eta_tem must be > 0");
        if (!(eta_per >= 0.0)) throw NonpositiveImpact("eta_per must be >= 0");
        if (!(sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
        if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
        if (!(lambda_M() >= 0.0)) throw InvalidInput("lambda_M must be >= 0");
        if (!(Delta >= 0.0)) throw InvalidInput("Delta must be >= 0");
        if (adverse_selection && !(eta_u > 0.0 && eta_d > 0.0)) {
            throw InvalidInput("eta_u and eta_d must be > 0 with adverse selection");
        }
        if (!(eta_I >= 0.0)) throw InvalidInput("eta_I must be >= 0");
    }
};

namespace detail {

inline void require_penalty(const LobParams& p) {
    if (!(2.0 * p.K > p.eta_per)) {
        throw InfeasiblePenalty("2K = " + std::to_string(2.0 * p.K) + " must exceed eta_per = " +
                                std::to_string(p.eta_per));
    }
}

// h(t) = 1 / (2/(eta_per - 2K) - (T-t)/eta_tem) - eta_per/2
inline double lob_h(const LobParams& p, double t) {
    if (t >= p.T) return -p.K;
    return 1.0 / (2.0 / (p.eta_per - 2.0 * p.K) - (p.T - t) / p.eta_tem) - p.eta_per / 2.0;
}

// D(t) = 1/(2K - eta_per) + (T-t)/(2 eta_tem); exp((1/2eta)int_t^r (2h+eta_per)) = D(r)/D(t)
inline double lob_D(const LobParams& p, double t) {
    return 1.0 / (2.0 * p.K - p.eta_per) + (p.T - std::min(t, p.T)) / (2.0 * p.eta_tem);
}

}  // namespace detail

/// Market-order-only strategy of a risk-neutral trader.
class MoOnlySolution {
public:
    explicit MoOnlySolution(LobParams p) : p_(std::move(p)) {
        p_.validate();
        detail::require_penalty(p_);
    }

    double h(double t) const { return detail::lob_h(p_, t); }
    double J(double t, double q) const { return h(t) * q * q; }
    double theta(double t, double q) const { return -(2.0 * h(t) + p_.eta_per) * q / (2.0 * p_.eta_tem); }

    /// Deterministic inventory X_t = Q D(t)/D(0).
    double inventory(double t) const { return p_.Q * detail::lob_D(p_, t) / detail::lob_D(p_, 0.0); }

    /// Inventory left at T-: 2 eta Q / (2 eta + T (2K - eta_per)).
    double X_T() const {
        return 2.0 * p_.eta_tem * p_.Q / (2.0 * p_.eta_tem + p_.T * (2.0 * p_.K - p_.eta_per));
    }

    const LobParams& params() const noexcept { return p_; }

private:
    LobParams p_;
};

inline MoOnlySolution mo_only_solution(const LobParams& p) { return MoOnlySolution(p); }

struct LobQuadratureConfig {
    std::size_t subintervals = 1000;
    std::size_t max_subintervals = 1024000;
    double rel_tolerance = 1e-8;
};

/// h, g, f tabulated on t_k = k T / n. Off-grid values are linearly interpolated.
struct LobCoefficients {
    LobParams params;
    double step = 0.0;
    std::vector<double> t, h, g, f;

    double h_at(double x) const { return detail::lob_h(params, x); }
    double g_at(double x) const { return x >= params.T ? 0.0 : quad::interp_uniform(g, 0.0, step, x); }
    double f_at(double x) const { return x >= params.T ? 0.0 : quad::interp_uniform(f, 0.0, step, x); }
    double value(double x, double q) const { return f_at(x) + g_at(x) * q + h_at(x) * q * q; }
};

namespace detail {

inline LobCoefficients lob_coefficients_fixed(const LobParams& p, std::size_t n, std::size_t inner) {
    LobCoefficients c;
    c.params = p;
    c.step = p.T / static_cast<double>(n);
    c.t.resize(n + 1);
    c.h.resize(n + 1);
    c.g.assign(n + 1, 0.0);
    const double lm = p.lambda_M();
    for (std::size_t k = 0; k <= n; ++k) {
        c.t[k] = k == n ? p.T : c.step * static_cast<double>(k);
        c.h[k] = lob_h(p, c.t[k]);
    }
    std::vector<double> integrand(inner + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = c.t[k];
        const double hs = (p.T - t0) / static_cast<double>(inner);
        const double Dt = lob_D(p, t0);
        for (std::size_t i = 0; i <= inner; ++i) {
            const double r = i == inner ? p.T : t0 + hs * static_cast<double>(i);
            integrand[i] = lob_D(p, r) / Dt * lob_h(p, r);
        }
        c.g[k] = -2.0 * lm * quad::simpson(integrand, hs);
    }
    std::vector<double> src(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        src[k] = lm * (p.eta_u + p.Delta + c.h[k] - c.g[k]) + c.g[k] * c.g[k] / (4.0 * p.eta_tem);
    }
    c.f = quad::reverse_cumulative_simpson(src, c.step);
    c.f[n] = 0.0;
    return c;
}

}  // namespace detail

/// n must be even. The inner Simpson count for g and the grid for f are doubled
/// until g and f stop moving by more than the relative tolerance.
inline LobCoefficients lob_coefficients(const LobParams& p, std::size_t n = 1000, LobQuadratureConfig cfg = {}) {
    p.validate();
    detail::require_penalty(p);
    if (n < 2 || n % 2 != 0) throw InvalidInput("coefficient grid needs an even interval count");
    std::size_t inner = cfg.subintervals;
    LobCoefficients coarse = detail::lob_coefficients_fixed(p, n, inner);
    for (std::size_t refine = 2; n * refine <= cfg.max_subintervals; refine *= 2) {
        inner *= 2;
        const LobCoefficients fine = detail::lob_coefficients_fixed(p, n * refine, inner);
        // relative to the largest magnitude so values vanishing at T do not dominate
        double sg = 1e-300, sf = 1e-300, dg = 0.0, df = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const std::size_t kf = k * refine;
            sg = std::max(sg, std::abs(fine.g[kf]));
            sf = std::max(sf, std::abs(fine.f[kf]));
            dg = std::max(dg, std::abs(fine.g[kf] - coarse.g[k]));
            df = std::max(df, std::abs(fine.f[kf] - coarse.f[k]));
        }
        const double worst = std::max(dg / sg, df / sf);
        if (worst <= cfg.rel_tolerance) return coarse;
        // keep the requested grid, refine its values from the finer table
        for (std::size_t k = 0; k <= n; ++k) {
            coarse.g[k] = fine.g[k * refine];
            coarse.f[k] = fine.f[k * refine];
        }
    }
    throw QuadratureNotConverged("LOB coefficients did not stabilise");
}

inline double theta_ml(double t, double q, const LobCoefficients& c) {
    return -(c.g_at(t) + (2.0 * c.h_at(t) + c.params.eta_per) * q) / (2.0 * c.params.eta_tem);
}

inline double theta_mo(double t, double q, const LobParams& p) {
    return -(2.0 * detail::lob_h(p, t) + p.eta_per) * q / (2.0 * p.eta_tem);
}

namespace detail {

// int_0^{t_k} [lambda_M - g(u)/(2 eta)] / D(u) du at every grid node
inline std::vector<double> lob_fill_drag(const LobCoefficients& c) {
    const LobParams& p = c.params;
    std::vector<double> w(c.t.size());
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        w[k] = (p.lambda_M() - c.g[k] / (2.0 * p.eta_tem)) / lob_D(p, c.t[k]);
    }
    return quad::cumulative_simpson(w, c.step);
}

}  // namespace detail

/// E[X_t] on the coefficient grid:
/// E[X_t] = D(t) (Q/D(0) - int_0^t [lambda_M - g(u)/2eta] / D(u) du).
inline std::vector<double> expected_inventory_curve(const LobCoefficients& c) {
    const std::vector<double> drag = detail::lob_fill_drag(c);
    const double D0 = detail::lob_D(c.params, 0.0);
    std::vector<double> out(c.t.size());
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        out[k] = detail::lob_D(c.params, c.t[k]) * (c.params.Q / D0 - drag[k]);
    }
    out[0] = c.params.Q;
    return out;
}

inline double expected_inventory(double t, const LobCoefficients& c) {
    if (!(t >= 0.0 && t < c.params.T)) throw InvalidInput("expected_inventory needs t in [0,T)");
    const std::vector<double> curve = expected_inventory_curve(c);
    return quad::interp_uniform(curve, 0.0, c.step, t);
}

/// Smallest Q for which the expected combined rate stays nonnegative on [0,T).
inline double min_feasible_target(const LobCoefficients& c) {
    const LobParams& p = c.params;
    const std::vector<double> drag = detail::lob_fill_drag(c);
    const double D0 = detail::lob_D(p, 0.0);
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < c.t.size(); ++k) {
        const double slope = 2.0 * c.h[k] + p.eta_per;
        const double b = D0 * (drag[k] - c.g[k] / (slope * detail::lob_D(p, c.t[k])));
        bound = std::max(bound, b);
    }
    return std::max(bound, 0.0);
}

inline double adverse_jump_prob(double lambda_M, double eta_u, double eta_d, double dt, bool mo_arrived) {
    if (mo_arrived) return 0.0;
    const double prob = lambda_M * (eta_u / eta_d) * dt;
    if (prob > 1.0) {
        throw ProbabilityOverflow("adverse jump probability " + std::to_string(prob) + " exceeds 1; reduce dt");
    }
    return prob;
}

inline double estimate_lambda_from_fills(double fill_count, double T) {
    if (!(T > 0.0)) throw InvalidInput("T must be > 0");
    return fill_count / T;
}

/// Horizon below which g(t) <= 2 eta_tem lambda_M on [0,T).
inline double lob_horizon_bound(const LobParams& p) {
    const double s = 2.0 * p.K - p.eta_per;
    return 2.0 * p.eta_tem / s * (std::sqrt(1.0 + 2.0 * s / p.eta_per) - 1.0);
}

}  // namespace liquidation
