#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uqsa/linalg.hpp"
#include "uqsa/rng.hpp"

namespace uqsa {

/// Finite-state discrete-time Markov chain. Rows of `kernel` must sum to 1
/// within 1e-10. An optional theta parametrization supplies per-transition
/// score vectors for path Fisher information.
struct FiniteDtmc {
    int n_states = 0;
    std::vector<double> kernel;  // n*n row-major, row-stochastic
    std::vector<double> initial; // length n, sums to 1

    int dim_theta = 0;
    std::function<std::vector<double>(int, int)> grad_log_kernel; // d/dtheta log p(x,y)

    double p(int x, int y) const {
        return kernel[static_cast<std::size_t>(x) * n_states + y];
    }

    std::span<const double> row(int x) const {
        return {kernel.data() + static_cast<std::size_t>(x) * n_states,
                static_cast<std::size_t>(n_states)};
    }

    void validate() const {
        if (n_states <= 0 || kernel.size() != static_cast<std::size_t>(n_states) * n_states)
            throw std::invalid_argument("FiniteDtmc: bad kernel shape");
        for (int x = 0; x < n_states; ++x) {
            double s = 0.0;
            for (int y = 0; y < n_states; ++y) {
                if (!(p(x, y) >= 0.0)) throw std::invalid_argument("FiniteDtmc: negative entry");
                s += p(x, y);
            }
            if (std::abs(s - 1.0) > 1e-10)
                throw std::invalid_argument("FiniteDtmc: kernel row is not normalized");
        }
        if (!initial.empty() && initial.size() != static_cast<std::size_t>(n_states))
            throw std::invalid_argument("FiniteDtmc: initial distribution length mismatch");
    }
};

/// Stationary distribution by power iteration on the transposed kernel.
inline std::vector<double> dtmc_stationary(const FiniteDtmc& chain, double tol = 1e-14,
                                           int max_iters = 200000) {
    chain.validate();
    const int n = chain.n_states;
    std::vector<double> pi(static_cast<std::size_t>(n), 1.0 / n);
    std::vector<double> next(static_cast<std::size_t>(n));
    for (int it = 0; it < max_iters; ++it) {
        for (int y = 0; y < n; ++y) {
            double s = 0.0;
            for (int x = 0; x < n; ++x) s += pi[static_cast<std::size_t>(x)] * chain.p(x, y);
            next[static_cast<std::size_t>(y)] = s;
        }
        double diff = 0.0, total = 0.0;
        for (int y = 0; y < n; ++y) {
            diff += std::abs(next[static_cast<std::size_t>(y)] - pi[static_cast<std::size_t>(y)]);
            total += next[static_cast<std::size_t>(y)];
        }
        for (int y = 0; y < n; ++y) pi[static_cast<std::size_t>(y)] = next[static_cast<std::size_t>(y)] / total;
        if (diff < tol) return pi;
    }
    throw std::runtime_error("dtmc_stationary: power iteration did not converge");
}

/// Markov kernel with general (possibly continuous) scalar state, given by
/// samplers and a transition log-density with parameter scores. Covers
/// time-discretized diffusions.
struct DtmcSpec {
    int dim_theta = 0;
    std::function<double(RngStream&)> sample_stationary;
    std::function<double(RngStream&, double)> sample_next;
    std::function<std::vector<double>(double, double)> grad_log_kernel; // d/dtheta log p(x,y)
    std::function<double(double, double)> log_kernel;                   // optional
    std::function<double(double)> row_relative_entropy; // optional: x -> R(p(x,.) || other(x,.))
};

/// Finite/truncated continuous-time Markov chain given by combined jump
/// rates c(x,x') = lambda(x) p(x,x'), zero diagonal. Rates must be
/// nonnegative, bounded (guard 1e12) and every state needs a positive exit
/// rate.
struct CtmcSpec {
    int n_states = 0;
    std::vector<double> rates; // n*n row-major, zero diagonal

    int dim_theta = 0;
    std::function<std::vector<double>(int, int)> grad_log_rate; // d/dtheta log c(x,x')
    std::vector<double> stationary;                             // optional known mu-tilde
    int initial_state = 0;

    double c(int x, int y) const {
        return rates[static_cast<std::size_t>(x) * n_states + y];
    }

    double exit_rate(int x) const {
        double s = 0.0;
        for (int y = 0; y < n_states; ++y) s += c(x, y);
        return s;
    }

    void validate() const {
        if (n_states <= 0 || rates.size() != static_cast<std::size_t>(n_states) * n_states)
            throw std::invalid_argument("CtmcSpec: bad rate shape");
        for (int x = 0; x < n_states; ++x) {
            if (c(x, x) != 0.0) throw std::invalid_argument("CtmcSpec: nonzero diagonal rate");
            double s = 0.0;
            for (int y = 0; y < n_states; ++y) {
                if (!(c(x, y) >= 0.0)) throw std::invalid_argument("CtmcSpec: negative rate");
                s += c(x, y);
            }
            if (s > 1e12) throw std::invalid_argument("CtmcSpec: rate blow-up (> 1e12)");
        }
        if (!stationary.empty() && stationary.size() != static_cast<std::size_t>(n_states))
            throw std::invalid_argument("CtmcSpec: stationary length mismatch");
    }
};

/// Stationary distribution of a CTMC via its uniformized jump chain.
inline std::vector<double> ctmc_stationary(const CtmcSpec& spec, double tol = 1e-14) {
    spec.validate();
    const int n = spec.n_states;
    double big = 0.0;
    for (int x = 0; x < n; ++x) big = std::max(big, spec.exit_rate(x));
    if (!(big > 0.0)) throw std::invalid_argument("ctmc_stationary: all rates vanish");
    big *= 1.05;
    FiniteDtmc uni;
    uni.n_states = n;
    uni.kernel.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int x = 0; x < n; ++x) {
        double off = 0.0;
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            uni.kernel[static_cast<std::size_t>(x) * n + y] = spec.c(x, y) / big;
            off += spec.c(x, y) / big;
        }
        uni.kernel[static_cast<std::size_t>(x) * n + x] = 1.0 - off;
    }
    return dtmc_stationary(uni, tol);
}

/// Ito diffusion dX = a(X; theta) dt + sigma(X) dW on R^d with nonsingular
/// diffusion. grad_drift fills a d-by-k Jacobian (row-major) of the drift in
/// the parameters.
struct SdeSpec {
    int dim = 1;
    int dim_theta = 0;
    std::function<void(std::span<const double>, std::span<double>)> drift;
    std::function<void(std::span<const double>, std::span<double>)> diffusion; // d*d row-major
    std::function<void(std::span<const double>, std::span<double>)> grad_drift; // d*k row-major
    std::function<std::vector<double>(RngStream&)> sample_stationary; // optional
    std::vector<double> x0; // initial state when no stationary sampler is used

    SquareMatrix diffusion_matrix(std::span<const double> x) const {
        SquareMatrix s(dim);
        diffusion(x, std::span<double>(s.a.data(), s.a.size()));
        return s;
    }

    /// Sigma = sigma sigma^T evaluated at x; throws on singular sigma.
    SquareMatrix covariance(std::span<const double> x) const {
        const SquareMatrix s = diffusion_matrix(x);
        if (std::abs(determinant(s)) < 1e-300)
            throw std::runtime_error("SdeSpec: singular diffusion");
        SquareMatrix cov(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double acc = 0.0;
                for (int k = 0; k < dim; ++k) acc += s(i, k) * s(j, k);
                cov(i, j) = acc;
            }
        return cov;
    }
};

} // namespace uqsa
