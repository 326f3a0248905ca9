#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uqsa/fisher.hpp"
#include "uqsa/math.hpp"
#include "uqsa/observable.hpp"
#include "uqsa/rng.hpp"

namespace uqsa {

/// Smooth parametric family of densities w.r.t. a fixed reference measure.
/// The sampler must be a deterministic function of (theta, seed) and should
/// couple draws across nearby theta through shared uniforms, so that
/// common-random-number finite differences are meaningful.
///
/// The optional closed-form hooks let known families (Gaussian location,
/// Poisson, Bernoulli, ...) report exact relative entropies and Fisher
/// matrices; estimators fall back to Monte Carlo when they are absent.
struct ParametricFamily {
    int dim_theta = 0;
    std::function<double(std::span<const double>, double)> log_density;
    std::function<std::vector<double>(std::span<const double>, double)> grad_log_density;
    std::function<std::vector<double>(std::span<const double>, std::uint64_t, int)> sampler;

    std::function<double(std::span<const double>, std::span<const double>)>
        exact_relative_entropy; // R(P^{theta_q} || P^{theta_p})
    std::function<SquareMatrix(std::span<const double>)> exact_fisher;
};

inline std::vector<double> normalized_direction(std::span<const double> v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (!(norm2 > 0.0)) throw std::invalid_argument("direction must be nonzero");
    std::vector<double> u(v.begin(), v.end());
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : u) x *= inv;
    return u;
}

/// Monte Carlo Fisher information: sample mean of score outer products.
inline FisherMatrix fim_monte_carlo(const ParametricFamily& fam,
                                    std::span<const double> theta, int n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("fim_monte_carlo: need n_samples >= 2");
    const auto samples = fam.sampler(theta, seed, n_samples);
    if (static_cast<int>(samples.size()) != n_samples)
        throw std::runtime_error("fim_monte_carlo: sampler failure");
    FisherAccumulator acc(fam.dim_theta);
    for (double w : samples) acc.add_outer(fam.grad_log_density(theta, w));
    return acc.finalize(FisherProvenance::static_measure);
}

/// Relative entropy of the eps-perturbed family member against its quadratic
/// Fisher approximation (eps^2 / 2) v^T F v; their gap is O(eps^3).
struct RelentQuadratic {
    double re = 0.0;
    double quad = 0.0;
};

inline RelentQuadratic relent_quadratic_check(const ParametricFamily& fam,
                                              std::span<const double> theta,
                                              std::span<const double> v, double eps,
                                              int n_samples = 200000,
                                              std::uint64_t seed = 1) {
    if (static_cast<int>(theta.size()) != fam.dim_theta ||
        static_cast<int>(v.size()) != fam.dim_theta)
        throw std::invalid_argument("relent_quadratic_check: dimension mismatch");
    if (eps == 0.0) return {0.0, 0.0};
    std::vector<double> shifted(theta.begin(), theta.end());
    for (int i = 0; i < fam.dim_theta; ++i) shifted[static_cast<std::size_t>(i)] += eps * v[i];

    RelentQuadratic out;
    if (fam.exact_relative_entropy) {
        out.re = fam.exact_relative_entropy(shifted, theta);
    } else {
        const auto draws = fam.sampler(shifted, seed, n_samples);
        double s = 0.0;
        for (double w : draws) {
            const double r = fam.log_density(shifted, w) - fam.log_density(theta, w);
            if (!std::isfinite(r))
                throw std::runtime_error("relent_quadratic_check: non-finite density ratio");
            s += r;
        }
        out.re = s / static_cast<double>(n_samples);
    }
    SquareMatrix f = fam.exact_fisher
                         ? fam.exact_fisher(theta)
                         : fim_monte_carlo(fam, theta, n_samples, seed + 1).entries;
    out.quad = 0.5 * eps * eps * quad_form(f, v);
    return out;
}

/// Likelihood-ratio sensitivity index: Monte Carlo estimate of
/// Cov(f, v . score) = E[(f - E f)(v^T grad log p)].
inline MeanStderr sensitivity_index_lr(const ParametricFamily& fam,
                                       std::span<const double> theta,
                                       std::span<const double> v, const Observable& f,
                                       int n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("sensitivity_index_lr: degenerate sample set");
    const auto u = normalized_direction(v);
    const auto draws = fam.sampler(theta, seed, n_samples);
    std::vector<double> fs(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) fs[i] = f(draws[i]);
    const double fbar = mean(fs);
    std::vector<double> terms(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto g = fam.grad_log_density(theta, draws[i]);
        double s = 0.0;
        for (int j = 0; j < fam.dim_theta; ++j) s += u[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
        terms[i] = (fs[i] - fbar) * s;
    }
    return mean_with_stderr(terms);
}

/// Gradient-free sensitivity bound sqrt(Var f) sqrt(v^T F v).
/// The direction is normalized to unit Euclidean norm on entry.
inline double sensitivity_bound_static(double var_f, const FisherMatrix& fisher,
                                       std::span<const double> v) {
    if (var_f < 0.0) throw std::invalid_argument("sensitivity_bound_static: negative variance");
    const auto u = normalized_direction(v);
    const double q = std::max(0.0, fisher.quad(u));
    return std::sqrt(var_f) * std::sqrt(q);
}

/// Sensitivity bound for sufficient statistics of an exponential family:
/// sqrt(H_kk H_ll) with H the log-normalizer Hessian. The bound is attained
/// exactly on the diagonal (k == l).
struct ExpfamBound {
    double bound = 0.0;
    bool equality = false;
};

inline ExpfamBound expfam_sufficient_bound(const SquareMatrix& hessF, int k_idx, int l_idx) {
    if (k_idx < 0 || l_idx < 0 || k_idx >= hessF.n || l_idx >= hessF.n)
        throw std::invalid_argument("expfam_sufficient_bound: index out of range");
    const double hk = hessF(k_idx, k_idx);
    const double hl = hessF(l_idx, l_idx);
    if (hk < 0.0 || hl < 0.0)
        throw std::invalid_argument("expfam_sufficient_bound: negative diagonal");
    return {std::sqrt(hk * hl), k_idx == l_idx};
}

/// Max relative error between grad_log_density and central finite
/// differences of log_density over the probe points.
inline double check_grad_consistency(const ParametricFamily& fam,
                                     std::span<const double> theta,
                                     std::span<const double> probes, double h = 1e-6) {
    double worst = 0.0;
    std::vector<double> tp(theta.begin(), theta.end());
    std::vector<double> tm(theta.begin(), theta.end());
    for (double w : probes) {
        const auto g = fam.grad_log_density(theta, w);
        for (int j = 0; j < fam.dim_theta; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            tp[ju] = theta[j] + h;
            tm[ju] = theta[j] - h;
            const double fd = (fam.log_density(tp, w) - fam.log_density(tm, w)) / (2.0 * h);
            tp[ju] = theta[j];
            tm[ju] = theta[j];
            const double scale = std::max({1.0, std::abs(g[ju]), std::abs(fd)});
            worst = std::max(worst, std::abs(g[ju] - fd) / scale);
        }
    }
    return worst;
}

} // namespace uqsa
