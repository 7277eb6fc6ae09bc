#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "liquidation/errors.hpp"

namespace liquidation {

struct EnsembleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;       // n-1 divisor
    double skewness = 0.0;  // m3 / m2^1.5
    double kurtosis = 0.0;  // m4 / m2^2, raw
    double mean_objective = std::numeric_limits<double>::quiet_NaN();
    double mean_final_inventory = std::numeric_limits<double>::quiet_NaN();
    double std_final_inventory = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline EnsembleStats moments(std::span<const double> x, bool strict) {
    EnsembleStats s;
    s.count = x.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (x.empty()) {
        if (strict) throw DegenerateSample("no samples");
        s.mean = s.std = s.skewness = s.kurtosis = nan;
        return s;
    }
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    s.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.std = x.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) {
        if (strict) throw DegenerateSample("sample variance is zero");
        s.skewness = s.kurtosis = nan;
        return s;
    }
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    return s;
}

}  // namespace detail

/// Mean, std, skewness and raw kurtosis; throws DegenerateSample on zero variance.
inline EnsembleStats summary_stats(std::span<const double> x) { return detail::moments(x, true); }

/// As summary_stats, but zero variance leaves skewness and kurtosis NaN.
inline EnsembleStats summary_stats_lenient(std::span<const double> x) { return detail::moments(x, false); }

}  // namespace liquidation
