#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace uqsa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double normal_pdf(double z) {
    return 0.3989422804014326779399461 * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244008444);
}

/// log((1/n) sum exp(v_i)), max-shifted so it never overflows.
inline double log_mean_exp(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("log_mean_exp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s / static_cast<double>(v.size()));
}

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Population variance (divides by n); lag-0 autocovariance convention.
inline double variance(std::span<const double> v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

/// Standard error of the mean of v (sample std / sqrt(n)).
inline double stderr_of_mean(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 2) return kInf;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
}

struct MeanStderr {
    double value = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_with_stderr(std::span<const double> v) {
    return {mean(v), stderr_of_mean(v)};
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope: need two samples of equal length");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return sxy / sxx;
}

} // namespace uqsa
