#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace uqsa {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15Weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss-7 weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

inline GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGk15Nodes[i];
        const double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
        k += kGk15Weights[i] * fv;
        if (i % 2 == 1 || i == 7) g += kG7Weights[i / 2] * fv;
    }
    return {k * h, std::abs(k - g) * std::abs(h)};
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
/// Subdivision stops once the summed Kronrod error estimate is below
/// rel_tol * |integral| + abs_tol; throws if the interval budget is exhausted.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14,
                        int max_intervals = 20000) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        return -integrate(f, b, a, rel_tol, abs_tol, max_intervals);
    }
    struct Interval {
        double a, b, integral, error;
    };
    std::vector<Interval> work;
    auto first = detail::gk15(f, a, b);
    work.push_back({a, b, first.integral, first.error});
    int used = 1;
    while (used < max_intervals) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < work.size(); ++i) {
            total += work[i].integral;
            err += work[i].error;
            if (work[i].error > work[worst].error) worst = i;
        }
        if (err <= rel_tol * std::abs(total) + abs_tol) return total;
        const Interval iv = work[worst];
        const double m = 0.5 * (iv.a + iv.b);
        if (m <= iv.a || m >= iv.b) return total; // interval at roundoff floor
        auto left = detail::gk15(f, iv.a, m);
        auto right = detail::gk15(f, m, iv.b);
        work[worst] = {iv.a, m, left.integral, left.error};
        work.push_back({m, iv.b, right.integral, right.error});
        ++used;
    }
    throw std::runtime_error("integrate: adaptive quadrature did not converge");
}

} // namespace uqsa
