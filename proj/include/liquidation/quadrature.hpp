#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace liquidation::quad {

/// Composite Simpson over uniformly spaced samples. samples.size() - 1 must be even.
inline double simpson(std::span<const double> f, double step) {
    const std::size_t n = f.size() - 1;
    if (f.size() < 3 || n % 2 != 0) throw std::invalid_argument("simpson needs an even number of intervals");
    double odd = 0.0, even = 0.0;
    for (std::size_t k = 1; k < n; k += 2) odd += f[k];
    for (std::size_t k = 2; k < n; k += 2) even += f[k];
    return step / 3.0 * (f[0] + f[n] + 4.0 * odd + 2.0 * even);
}

/// Running integral from the first node, evaluated at every node with the
/// same panels as `simpson`. Odd nodes use the one-sided parabola
/// (5 f0 + 8 f1 - f2) h / 12 over the first half of each panel.
inline std::vector<double> cumulative_simpson(std::span<const double> f, double step) {
    const std::size_t n = f.size() - 1;
    if (f.size() < 3 || n % 2 != 0) throw std::invalid_argument("cumulative_simpson needs an even number of intervals");
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t j = 0; j < n; j += 2) {
        out[j + 1] = out[j] + step / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
        out[j + 2] = out[j] + step / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    }
    return out;
}

/// out[k] = integral from node k to the last node.
inline std::vector<double> reverse_cumulative_simpson(std::span<const double> f, double step) {
    std::vector<double> rev(f.rbegin(), f.rend());
    std::vector<double> acc = cumulative_simpson(rev, step);
    return std::vector<double>(acc.rbegin(), acc.rend());
}

inline double trapezoid(std::span<const double> f, double step) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
    return s * step;
}

inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double step) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * step * (f[k - 1] + f[k]);
    return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Linear interpolation on a uniform grid starting at x0; clamps outside.
inline double interp_uniform(std::span<const double> values, double x0, double step, double x) {
    const double pos = (x - x0) / step;
    if (pos <= 0.0) return values.front();
    const auto last = static_cast<double>(values.size() - 1);
    if (pos >= last) return values.back();
    const auto i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return values[i] + w * (values[i + 1] - values[i]);
}

}  // namespace liquidation::quad
