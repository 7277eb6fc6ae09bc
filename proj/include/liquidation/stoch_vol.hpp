#pragma once

// Single-venue liquidation under a slow mean-reverting OU volatility factor,
//     dnu = eps (m - nu) dt + xi sqrt(eps) dB,   sigma = phi(nu).
// h = h0 + eps h1 + O(eps^2), with h0 the constant-vol solution frozen at
// phi(nu) and h1 a discounted time integral of L0 h0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liquidation/constant_vol.hpp"
#include "liquidation/errors.hpp"
#include "liquidation/market_core.hpp"
#include "liquidation/quadrature.hpp"

namespace liquidation {

using OUParams = SlowOUVolatility;

struct StochVolParams {
    double Q = 100.0;
    double T = 1.0;
    double lambda = 0.1;
    double K = 0.1;
    double eta_tem = 0.01;
    double eta_per = 0.005;
    double nu0 = 0.5;
    OUParams ou{1.0, 0.01, 2.0, -0.4};

    ModelParams model() const { return ModelParams{Q, T, lambda, K, ou}; }

    void validate() const {
        model().validate();
        if (!(eta_tem > 0.0)) throw NonpositiveImpact("eta_tem must be > 0");
        if (!(eta_per >= 0.0)) throw NonpositiveImpact("eta_per must be >= 0");
        if (!std::isfinite(nu0)) throw InvalidInput("nu0 must be finite");
    }
};

struct GaussianMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline GaussianMoments ou_transition(double nu0, double t, const OUParams& ou) {
    if (!(t >= 0.0)) throw InvalidInput("transition time must be >= 0");
    const double decay = std::exp(-ou.epsilon * t);
    // 1 - e^{-2 eps t} without cancellation for small eps t
    const double spread = -std::expm1(-2.0 * ou.epsilon * t);
    return {ou.m + (nu0 - ou.m) * decay, 0.5 * ou.xi * ou.xi * spread};
}

struct AsymptoticConfig {
    std::size_t subintervals = 200;      // starting Simpson count for h1, doubled on demand
    std::size_t max_subintervals = 204800;
    double rel_tolerance = 1e-8;
    double fd_step = 1e-4;               // scaled by max(1, |nu|)
};

/// h1 tabulated on a (t, nu) lattice for use inside path simulations.
struct H1Table {
    double t_step = 0.0;
    double nu_lo = 0.0;
    double nu_step = 0.0;
    std::size_t t_count = 0;
    std::size_t nu_count = 0;
    std::vector<double> values;  // values[i * nu_count + j] at (i t_step, nu_lo + j nu_step)

    double at(double t, double nu) const {
        const double pos = std::clamp(t / t_step, 0.0, static_cast<double>(t_count - 1));
        auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= t_count) i = t_count - 2;
        const double w = pos - static_cast<double>(i);
        const std::span<const double> row0(values.data() + i * nu_count, nu_count);
        const std::span<const double> row1(values.data() + (i + 1) * nu_count, nu_count);
        const double a = quad::interp_uniform(row0, nu_lo, nu_step, nu);
        if (w == 0.0) return a;
        return a + w * (quad::interp_uniform(row1, nu_lo, nu_step, nu) - a);
    }
};

class AsymptoticSolution {
public:
    explicit AsymptoticSolution(StochVolParams params, AsymptoticConfig cfg = {})
        : p_(std::move(params)), cfg_(cfg) {
        p_.validate();
        if (cfg_.subintervals < 2 || cfg_.subintervals % 2 != 0) {
            throw InvalidInput("h1 subinterval count must be even and >= 2");
        }
        const Venue single{1.0, p_.eta_tem};
        agg_ = aggregate_impacts(VenueSet::validate(std::span<const Venue>(&single, 1), p_.eta_per));
        shift_ = agg_.b / (2.0 * agg_.a);
    }

    const StochVolParams& params() const noexcept { return p_; }
    const AsymptoticConfig& config() const noexcept { return cfg_; }
    double phi(double nu) const { return p_.ou.phi(nu); }

    double h0(double t, double nu) const {
        if (t >= p_.T) return -p_.K;
        const double s = phi(nu);
        const detail::RiccatiFlow flow(agg_.a, delta_N(agg_, p_.lambda, s), shift_ - p_.K);
        return flow(p_.T - t) - shift_;
    }

    double generator_L0_h0(double t, double nu) const { return generator_L0_h0(t, nu, cfg_.fd_step); }

    double generator_L0_h0(double t, double nu, double rel_step) const {
        const double d = rel_step * std::max(1.0, std::abs(nu));
        const double up = h0(t, nu + d), mid = h0(t, nu), dn = h0(t, nu - d);
        const double first = (up - dn) / (2.0 * d);
        const double second = (up - 2.0 * mid + dn) / (d * d);
        return (p_.ou.m - nu) * first + 0.5 * p_.ou.xi * p_.ou.xi * second;
    }

    /// Simpson estimate with a fixed count; D's inner integral reuses the outer nodes.
    double h1_fixed(double t, double nu, std::size_t subintervals) const {
        if (t >= p_.T) return 0.0;
        const std::size_t n = subintervals;
        const double step = (p_.T - t) / static_cast<double>(n);
        std::vector<double> rate(n + 1), gen(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double r = k == n ? p_.T : t + step * static_cast<double>(k);
            rate[k] = (2.0 * h0(r, nu) + p_.eta_per) / p_.eta_tem;
            gen[k] = generator_L0_h0(r, nu);
        }
        const std::vector<double> exponent = quad::cumulative_simpson(rate, step);
        for (std::size_t k = 0; k <= n; ++k) gen[k] *= std::exp(exponent[k]);
        return quad::simpson(gen, step);
    }

    double h1(double t, double nu) const {
        if (t >= p_.T) return 0.0;
        std::size_t n = cfg_.subintervals;
        double prev = h1_fixed(t, nu, n);
        while (n < cfg_.max_subintervals) {
            n *= 2;
            const double next = h1_fixed(t, nu, n);
            const double scale = std::max(std::abs(next), 1e-300);
            if (std::abs(next - prev) <= cfg_.rel_tolerance * scale || next == prev) return next;
            prev = next;
        }
        throw QuadratureNotConverged("h1 at (t=" + std::to_string(t) + ", nu=" + std::to_string(nu) +
                                     ") still moving after " + std::to_string(n) + " subintervals");
    }

    double theta_moving_constant(double t, double nu, double q) const {
        return -(2.0 * h0(t, nu) + p_.eta_per) * q / (2.0 * p_.eta_tem);
    }

    double theta_corrected(double t, double nu, double q) const {
        const double base = theta_moving_constant(t, nu, q);
        if (p_.ou.epsilon == 0.0) return base;
        return base - p_.ou.epsilon / p_.eta_tem * h1(t, nu) * q;
    }

    /// h1 on t_k = k T / t_intervals (t_intervals even) and a uniform nu grid.
    /// Each nu column is swept backwards panel by panel with D(t_{k+2}; t_k) <= 1,
    /// so large volatilities never overflow the discount factor.
    H1Table tabulate_h1(std::size_t t_intervals, double nu_lo, double nu_hi, double nu_step) const {
        if (t_intervals < 2 || t_intervals % 2 != 0) throw InvalidInput("h1 table needs an even time count");
        if (!(nu_hi > nu_lo) || !(nu_step > 0.0)) throw InvalidInput("h1 table needs nu_hi > nu_lo, step > 0");
        H1Table tab;
        tab.t_count = t_intervals + 1;
        tab.t_step = p_.T / static_cast<double>(t_intervals);
        tab.nu_lo = nu_lo;
        tab.nu_step = nu_step;
        tab.nu_count = static_cast<std::size_t>(std::ceil((nu_hi - nu_lo) / nu_step - 1e-9)) + 1;
        tab.values.assign(tab.t_count * tab.nu_count, 0.0);

        const std::size_t n = t_intervals;
        const double hs = tab.t_step;
        std::vector<double> rate(n + 1), gen(n + 1), expo, col(n + 1);
        for (std::size_t j = 0; j < tab.nu_count; ++j) {
            const double nu = nu_lo + nu_step * static_cast<double>(j);
            for (std::size_t k = 0; k <= n; ++k) {
                const double r = k == n ? p_.T : hs * static_cast<double>(k);
                rate[k] = (2.0 * h0(r, nu) + p_.eta_per) / p_.eta_tem;
                gen[k] = generator_L0_h0(r, nu);
            }
            expo = quad::cumulative_simpson(rate, hs);
            auto D = [&](std::size_t r, std::size_t from) { return std::exp(expo[r] - expo[from]); };
            col[n] = 0.0;
            for (std::size_t k = n; k >= 2; k -= 2) {
                const std::size_t k0 = k - 2;
                col[k0] = hs / 3.0 * (gen[k0] + 4.0 * D(k0 + 1, k0) * gen[k0 + 1] + D(k, k0) * gen[k]) +
                          D(k, k0) * col[k];
                // odd node: one-sided parabola over [t_{k-1}, t_k] through k-2, k-1, k
                const std::size_t k1 = k - 1;
                col[k1] = hs / 12.0 * (-D(k0, k1) * gen[k0] + 8.0 * gen[k1] + 5.0 * D(k, k1) * gen[k]) +
                          D(k, k1) * col[k];
            }
            for (std::size_t k = 0; k <= n; ++k) tab.values[k * tab.nu_count + j] = col[k];
        }
        return tab;
    }

private:
    StochVolParams p_;
    AsymptoticConfig cfg_;
    ImpactAggregates agg_;
    double shift_ = 0.0;
};

}  // namespace liquidation
