#pragma once

// Closed-form mean-quadratic liquidation with constant volatility across N
// venues. The value function is J(t,q) = h(t) q^2 where h solves
//
//     h' = Delta_N - a (h + b/2a)^2,   h(T-) = -K,
//     Delta_N = lambda sigma^2 + (b^2 - 4ac) / 4a.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liquidation/errors.hpp"
#include "liquidation/market_core.hpp"
#include "liquidation/quadrature.hpp"

namespace liquidation {

enum class Branch { Hyperbolic, Trigonometric };

inline constexpr double kDeltaZeroThreshold = 1e-14;

inline double delta_N(const ImpactAggregates& agg, double lambda, double sigma) noexcept {
    return lambda * sigma * sigma + agg.discriminant / (4.0 * agg.a);
}

/// Strict inequality K > b/2a + sqrt(|Delta_N| / a).
inline bool check_condition_14(double K, const ImpactAggregates& agg, double delta) noexcept {
    return K > agg.b / (2.0 * agg.a) + std::sqrt(std::abs(delta) / agg.a);
}

namespace detail {

/// Backward flow of u' = delta - a u^2 from u(T) = u_T over remaining time tau.
/// With c = sqrt(delta/a) and k = sqrt(a delta) tau the solution is
///     u = (u_T - c tanh k) / (1 - u_T tanh(k)/c),
/// which is the hyperbolic closed form with the varsigma fraction cleared;
/// tanh(k)/c -> a tau keeps delta = 0 exact. For delta < 0 the same flow
/// becomes d tan(arctan(u_T/d) + sqrt(-a delta) tau) with d = sqrt(-delta/a).
class RiccatiFlow {
public:
    RiccatiFlow(double a, double delta, double u_terminal) : a_(a), delta_(delta), u_T_(u_terminal) {
        branch_ = delta_ < -kDeltaZeroThreshold ? Branch::Trigonometric : Branch::Hyperbolic;
        if (branch_ == Branch::Trigonometric) {
            d_ = std::sqrt(-delta_ / a_);
            omega_ = std::sqrt(-a_ * delta_);
            phase_ = std::atan(u_T_ / d_);
        } else {
            c_ = std::sqrt(std::max(delta_, 0.0) / a_);
            root_ = std::sqrt(a_ * std::max(delta_, 0.0));
        }
    }

    Branch branch() const noexcept { return branch_; }

    double operator()(double tau) const {
        if (tau <= 0.0) return u_T_;
        if (branch_ == Branch::Trigonometric) {
            const double arg = phase_ + omega_ * tau;
            if (arg >= std::numbers::pi / 2.0) {
                throw TanSingularity("tan argument " + std::to_string(arg) + " reaches pi/2 with " +
                                     std::to_string(tau) + " time remaining");
            }
            return d_ * std::tan(arg);
        }
        const double k = root_ * tau;
        const double th = std::tanh(k);
        const double tanh_over_k = k < 1e-4 ? 1.0 - k * k / 3.0 : th / k;
        const double tanh_over_c = a_ * tau * tanh_over_k;
        const double denom = 1.0 - u_T_ * tanh_over_c;
        if (!(denom > 0.0)) {
            throw TanSingularity("hyperbolic branch escapes in finite time (denominator " + std::to_string(denom) +
                                 ")");
        }
        return (u_T_ - c_ * th) / denom;
    }

    /// Largest remaining time before blow-up (infinity when none).
    double escape_time() const noexcept {
        if (branch_ == Branch::Trigonometric) return (std::numbers::pi / 2.0 - phase_) / omega_;
        if (u_T_ <= c_) return std::numeric_limits<double>::infinity();
        // 1 - u_T tanh(k)/c = 0  =>  tanh(k) = c / u_T
        if (c_ == 0.0) return 1.0 / (a_ * u_T_);
        return std::atanh(c_ / u_T_) / root_;
    }

private:
    double a_, delta_, u_T_;
    Branch branch_ = Branch::Hyperbolic;
    double c_ = 0.0, root_ = 0.0;
    double d_ = 0.0, omega_ = 0.0, phase_ = 0.0;
};

}  // namespace detail

struct TradingCurve {
    std::vector<double> grid;                // t_0 = 0, ..., t_n = T (last point is T-)
    std::vector<double> inventory;           // X(t_k)
    std::vector<std::vector<double>> rates;  // rates[k][venue]
};

class ConstantVolSolution {
public:
    ConstantVolSolution(const ModelParams& params, VenueSet venues)
        : params_(params), venues_(std::move(venues)), agg_(aggregate_impacts(venues_)),
          flow_(1.0, 0.0, 0.0) {
        params_.validate();
        const auto* vol = std::get_if<ConstantVolatility>(&params_.vol);
        if (vol == nullptr) throw InvalidInput("constant-volatility solver needs a ConstantVolatility model");
        sigma_ = vol->sigma;
        delta_ = delta_N(agg_, params_.lambda, sigma_);
        flow_ = detail::RiccatiFlow(agg_.a, delta_, agg_.b / (2.0 * agg_.a) - params_.K);
        admissible_ = check_condition_14(params_.K, agg_, delta_);
        if (delta_ > kDeltaZeroThreshold) {
            const double z = (2.0 * params_.K * agg_.a - agg_.b) / (2.0 * std::sqrt(agg_.a * delta_));
            if (1.0 + z != 0.0) varsigma_ = (1.0 - z) / (1.0 + z);
        }
    }

    const ModelParams& params() const noexcept { return params_; }
    const VenueSet& venues() const noexcept { return venues_; }
    const ImpactAggregates& aggregates() const noexcept { return agg_; }
    double sigma() const noexcept { return sigma_; }
    double delta() const noexcept { return delta_; }
    Branch branch() const noexcept { return flow_.branch(); }
    std::optional<double> varsigma() const noexcept { return varsigma_; }
    /// False when the parameters violate condition (14); formulas still evaluate.
    bool admissible() const noexcept { return admissible_; }
    /// Remaining time at which h blows up; infinite for the usual regime.
    double escape_time() const noexcept { return flow_.escape_time(); }

    double h(double t) const {
        if (t >= params_.T) return -params_.K;
        return flow_(params_.T - t) - agg_.b / (2.0 * agg_.a);
    }

    void optimal_rates(double t, double q, std::span<double> out) const {
        if (out.size() != venues_.size()) throw LengthMismatch("rate buffer does not match venue count");
        const double hv = h(t);
        for (std::size_t n = 0; n < venues_.size(); ++n) {
            out[n] = -(2.0 * hv + venues_.eta_per() * venues_[n].beta) * q / (2.0 * venues_[n].eta_tem);
        }
    }

    std::vector<double> optimal_rates(double t, double q) const {
        std::vector<double> out(venues_.size());
        optimal_rates(t, q, out);
        return out;
    }

    /// d log X / dt along the optimal path: sum_n (2h + eta_per beta_n) / (2 eta_n).
    double inventory_log_rate(double t) const {
        const double hv = h(t);
        double s = 0.0;
        for (std::size_t n = 0; n < venues_.size(); ++n) {
            s += (2.0 * hv + venues_.eta_per() * venues_[n].beta) / (2.0 * venues_[n].eta_tem);
        }
        return s;
    }

    double value(double t, double q) const { return h(t) * q * q; }

    TradingCurve inventory_trajectory(std::size_t intervals = 2000) const {
        TradingCurve curve;
        const double step = params_.T / static_cast<double>(intervals);
        curve.grid.resize(intervals + 1);
        std::vector<double> log_rate(intervals + 1);
        for (std::size_t k = 0; k <= intervals; ++k) {
            curve.grid[k] = k == intervals ? params_.T : step * static_cast<double>(k);
            log_rate[k] = inventory_log_rate(curve.grid[k]);
        }
        const std::vector<double> exponent = quad::cumulative_trapezoid(log_rate, step);
        curve.inventory.resize(intervals + 1);
        curve.rates.resize(intervals + 1);
        for (std::size_t k = 0; k <= intervals; ++k) {
            curve.inventory[k] = params_.Q * std::exp(exponent[k]);
            curve.rates[k] = optimal_rates(curve.grid[k], curve.inventory[k]);
        }
        return curve;
    }

private:
    ModelParams params_;
    VenueSet venues_;
    ImpactAggregates agg_;
    double sigma_ = 0.0;
    double delta_ = 0.0;
    detail::RiccatiFlow flow_;
    bool admissible_ = false;
    std::optional<double> varsigma_;
};

inline double h_closed_form(double t, const ConstantVolSolution& sol) { return sol.h(t); }

/// Independent RK4 integration of h' = lambda sigma^2 - sum_n (2h + eta_per beta_n)^2 / (4 eta_n)
/// backward from h(T) = -K, reported at the (ascending, T-terminated) grid.
/// Each grid gap is split into substeps no longer than max_step; every substep
/// is checked against two half steps and StepTooLarge is raised when the
/// estimated local error exceeds 1e-6.
inline std::vector<double> h_ode_oracle(const ConstantVolSolution& sol, std::span<const double> grid,
                                        double max_step = 1e-5) {
    const ModelParams& p = sol.params();
    if (grid.empty() || std::abs(grid.back() - p.T) > 1e-12 * std::max(1.0, p.T)) {
        throw InvalidInput("oracle grid must end at T");
    }
    const double drive = p.lambda * sol.sigma() * sol.sigma();
    const VenueSet& v = sol.venues();
    auto rhs = [&](double h) {
        double s = 0.0;
        for (std::size_t n = 0; n < v.size(); ++n) {
            const double w = 2.0 * h + v.eta_per() * v[n].beta;
            s += w * w / (4.0 * v[n].eta_tem);
        }
        return drive - s;
    };
    // Autonomous ODE, so a step of signed size ds only needs h.
    auto rk4 = [&](double h, double ds) {
        const double k1 = rhs(h);
        const double k2 = rhs(h + 0.5 * ds * k1);
        const double k3 = rhs(h + 0.5 * ds * k2);
        const double k4 = rhs(h + ds * k3);
        return h + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    std::vector<double> out(grid.size());
    double h = -p.K;
    out.back() = h;
    for (std::size_t i = grid.size() - 1; i-- > 0;) {
        const double gap = grid[i + 1] - grid[i];
        const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(gap / max_step - 1e-9)));
        const double ds = -gap / static_cast<double>(substeps);
        for (std::size_t s = 0; s < substeps; ++s) {
            const double full = rk4(h, ds);
            const double halves = rk4(rk4(h, 0.5 * ds), 0.5 * ds);
            const double err = std::abs(full - halves) / 15.0;
            if (err > 1e-6) {
                throw StepTooLarge("local error estimate " + std::to_string(err) + " at step " + std::to_string(-ds));
            }
            h = full;
        }
        out[i] = h;
    }
    return out;
}

struct EqualVenueInputs {
    double lambda = 0.1;
    double sigma = std::numbers::e;
    double eta_tem = 0.01;
    double eta_per = 0.005;
    double K = 0.1;
    double T = 1.0;
};

/// Per-venue feedback coefficient J(t,N) for N identical venues, so that
/// theta_n(t) = J(t,N) X_t. Evaluated without materialising the venues.
inline double equal_venue_rate_coefficient(double t, std::size_t count, const EqualVenueInputs& in) {
    const double n = static_cast<double>(count);
    const double a = n / in.eta_tem;
    const double delta = in.lambda * in.sigma * in.sigma;
    const double u_T = in.eta_per / (2.0 * n) - in.K;
    const detail::RiccatiFlow flow(a, delta, u_T);
    const double u = t >= in.T ? u_T : flow(in.T - t);
    return -u / in.eta_tem;
}

}  // namespace liquidation
