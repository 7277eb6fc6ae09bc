#pragma once

// Linear market-impact model shared by every solver: venue aggregation under
// no-arbitrage, execution prices, terminal clearing and admissibility checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "liquidation/errors.hpp"

namespace liquidation {

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kNegativeRateTolerance = 1e-9;
inline constexpr double kBudgetTolerance = 1e-9;

struct Venue {
    double beta = 1.0;     // no-arbitrage efficiency weight
    double eta_tem = 0.0;  // temporary impact coefficient
};

/// Validated set of venues sharing one permanent impact coefficient.
/// Weights lie in (0,1] and sum to one; a single venue carries beta = 1.
class VenueSet {
public:
    static VenueSet validate(std::span<const Venue> raw, double eta_per) {
        if (raw.empty()) {
            throw WeightsNotSimplex("venue list is empty");
        }
        if (!(eta_per >= 0.0) || !std::isfinite(eta_per)) {
            throw NonpositiveImpact("eta_per must be finite and >= 0, got " + std::to_string(eta_per));
        }
        double total = 0.0;
        for (std::size_t n = 0; n < raw.size(); ++n) {
            const Venue& v = raw[n];
            if (!(v.beta > 0.0 && v.beta <= 1.0)) {
                throw WeightsNotSimplex("beta[" + std::to_string(n) + "] = " + std::to_string(v.beta) +
                                        " outside (0,1]");
            }
            if (!(v.eta_tem > 0.0) || !std::isfinite(v.eta_tem)) {
                throw NonpositiveImpact("eta_tem[" + std::to_string(n) + "] = " + std::to_string(v.eta_tem));
            }
            total += v.beta;
        }
        if (std::abs(total - 1.0) > kSimplexTolerance) {
            throw WeightsNotSimplex("sum of beta = " + std::to_string(total));
        }
        VenueSet out;
        out.venues_.assign(raw.begin(), raw.end());
        out.eta_per_ = eta_per;
        return out;
    }

    /// N venues with beta = 1/N and a common temporary coefficient.
    static VenueSet identical(std::size_t count, double eta_tem, double eta_per) {
        std::vector<Venue> raw(count, Venue{1.0 / static_cast<double>(count), eta_tem});
        return validate(raw, eta_per);
    }

    std::size_t size() const noexcept { return venues_.size(); }
    const Venue& operator[](std::size_t n) const { return venues_[n]; }
    std::span<const Venue> venues() const noexcept { return venues_; }
    double eta_per() const noexcept { return eta_per_; }

private:
    VenueSet() = default;

    std::vector<Venue> venues_;
    double eta_per_ = 0.0;
};

/// Per-venue and summed coefficients of the Riccati equation for h.
struct ImpactAggregates {
    std::vector<double> a_n, b_n, c_n;
    double a = 0.0, b = 0.0, c = 0.0;
    // b^2 - 4ac, evaluated in the cancellation-free form
    // -eta_per^2 * a * sum_n a_n (beta_n - beta_bar)^2.
    double discriminant = 0.0;
};

inline ImpactAggregates aggregate_impacts(const VenueSet& v) {
    ImpactAggregates agg;
    const std::size_t count = v.size();
    agg.a_n.resize(count);
    agg.b_n.resize(count);
    agg.c_n.resize(count);
    double weighted_beta = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        const double eta = v[n].eta_tem;
        const double pb = v.eta_per() * v[n].beta;
        agg.a_n[n] = 1.0 / eta;
        agg.b_n[n] = pb / eta;
        agg.c_n[n] = pb * pb / (4.0 * eta);
        agg.a += agg.a_n[n];
        agg.b += agg.b_n[n];
        agg.c += agg.c_n[n];
        weighted_beta += agg.a_n[n] * v[n].beta;
    }
    const double beta_bar = weighted_beta / agg.a;
    double spread = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        const double d = v[n].beta - beta_bar;
        spread += agg.a_n[n] * d * d;
    }
    agg.discriminant = -v.eta_per() * v.eta_per() * agg.a * spread;
    return agg;
}

/// Magnitude of the downward drift eta_per * sum beta_n theta_n.
inline double permanent_drift(const VenueSet& v, std::span<const double> rates) {
    if (rates.size() != v.size()) {
        throw LengthMismatch("got " + std::to_string(rates.size()) + " rates for " + std::to_string(v.size()) +
                             " venues");
    }
    double s = 0.0;
    for (std::size_t n = 0; n < rates.size(); ++n) {
        s += v[n].beta * rates[n];
    }
    return v.eta_per() * s;
}

inline double execution_price(double mid, double eta_tem_n, double rate) noexcept { return mid - eta_tem_n * rate; }

/// Cash from clearing q shares at T- under the linear penalty C(q) = K q.
inline double terminal_liquidation_value(double q, double s, double K) noexcept { return q * (s - K * q); }

// ---------------------------------------------------------------------------
// Model parameters

struct ConstantVolatility {
    double sigma = 1.0;
};

struct SlowOUVolatility {
    double m = 0.0;
    double epsilon = 0.0;
    double xi = 0.0;
    double rho = 0.0;
    std::function<double(double)> phi = [](double nu) { return std::exp(nu); };
};

using VolatilityModel = std::variant<ConstantVolatility, SlowOUVolatility>;

struct ModelParams {
    double Q = 100.0;
    double T = 1.0;
    double lambda = 0.0;
    double K = 0.1;
    VolatilityModel vol = ConstantVolatility{};

    void validate() const {
        if (!(Q > 0.0)) throw InvalidInput("Q must be > 0");
        if (!(T > 0.0)) throw InvalidInput("T must be > 0");
        if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
        if (!(K > 0.0)) throw InvalidInput("K must be > 0");
        if (const auto* c = std::get_if<ConstantVolatility>(&vol)) {
            if (!(c->sigma > 0.0)) throw InvalidInput("sigma must be > 0");
        } else {
            const auto& ou = std::get<SlowOUVolatility>(vol);
            if (!(ou.epsilon >= 0.0)) throw InvalidInput("epsilon must be >= 0");
            if (!(ou.xi >= 0.0)) throw InvalidInput("xi must be >= 0");
            if (!(std::abs(ou.rho) < 1.0)) throw InvalidInput("|rho| must be < 1");
            if (!ou.phi) throw InvalidInput("phi is not set");
        }
    }
};

// ---------------------------------------------------------------------------
// Rate paths and admissibility

/// samples[k][n] is the rate in venue n at t_k = k T / (samples.size() - 1).
using RateSamples = std::vector<std::vector<double>>;

struct AdmissibilityReport {
    bool nonnegative = true;
    bool consistent = true;
    double integral = 0.0;       // trapezoidal integral of the total rate
    double quadrature_error = 0.0;  // |I(dt) - I(2dt)| / 3, zero when the grid cannot be halved
    double max_violation = 0.0;  // worst negative rate or budget overshoot
};

namespace detail {

template <class F>
double trapezoid_over_samples(const RateSamples& samples, double T, F&& per_sample) {
    if (samples.size() < 2) return 0.0;
    const double dt = T / static_cast<double>(samples.size() - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double w = (k == 0 || k + 1 == samples.size()) ? 0.5 : 1.0;
        acc += w * per_sample(samples[k]);
    }
    return acc * dt;
}

}  // namespace detail

inline AdmissibilityReport check_admissibility(const RateSamples& samples, double Q, double T) {
    AdmissibilityReport r;
    double worst_negative = 0.0;
    for (const auto& row : samples) {
        for (double rate : row) worst_negative = std::min(worst_negative, rate);
    }
    r.nonnegative = worst_negative >= -kNegativeRateTolerance;
    r.integral = detail::trapezoid_over_samples(samples, T, [](const std::vector<double>& row) {
        return std::accumulate(row.begin(), row.end(), 0.0);
    });
    if (samples.size() >= 3 && (samples.size() - 1) % 2 == 0) {
        RateSamples coarse;
        for (std::size_t k = 0; k < samples.size(); k += 2) coarse.push_back(samples[k]);
        const double coarse_integral = detail::trapezoid_over_samples(coarse, T, [](const std::vector<double>& row) {
            return std::accumulate(row.begin(), row.end(), 0.0);
        });
        r.quadrature_error = std::abs(r.integral - coarse_integral) / 3.0;
    }
    // sampled fast-decaying rates overshoot under the trapezoid rule; forgive that much
    const double excess = r.integral - r.quadrature_error - Q;
    r.consistent = excess <= Q * kBudgetTolerance;
    r.max_violation = std::max({0.0, -worst_negative, excess});
    return r;
}

/// Temporary-impact cost sum_n eta_n theta_n^2 integrated over the grid.
inline double temporary_impact_cost(const VenueSet& v, const RateSamples& samples, double T) {
    return detail::trapezoid_over_samples(samples, T, [&](const std::vector<double>& row) {
        if (row.size() != v.size()) throw LengthMismatch("rate row does not match venue count");
        double s = 0.0;
        for (std::size_t n = 0; n < row.size(); ++n) s += v[n].eta_tem * row[n] * row[n];
        return s;
    });
}

/// Splits a single-venue schedule evenly across `count` venues.
inline RateSamples split_equally(std::span<const double> single, std::size_t count) {
    RateSamples out;
    out.reserve(single.size());
    for (double rate : single) out.emplace_back(count, rate / static_cast<double>(count));
    return out;
}

}  // namespace liquidation
