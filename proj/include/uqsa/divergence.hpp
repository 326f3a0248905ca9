#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqsa/math.hpp"

namespace uqsa {

/// Probability mass function on a finite labelled support.
/// Probabilities must be nonnegative and sum to 1 within 1e-12.
struct DiscreteDist {
    std::vector<double> support; // numeric labels, used as observable inputs
    std::vector<double> probs;

    DiscreteDist() = default;
    DiscreteDist(std::vector<double> labels, std::vector<double> p)
        : support(std::move(labels)), probs(std::move(p)) {
        validate();
    }

    std::size_t size() const { return probs.size(); }

    void validate() const {
        if (support.size() != probs.size())
            throw std::invalid_argument("DiscreteDist: support/probs length mismatch");
        if (probs.empty()) throw std::invalid_argument("DiscreteDist: empty support");
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw std::invalid_argument("DiscreteDist: negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("DiscreteDist: probabilities sum to " +
                                        std::to_string(total));
    }

    static DiscreteDist bernoulli(double p) {
        return DiscreteDist({0.0, 1.0}, {1.0 - p, p});
    }

    static DiscreteDist uniform(int n) {
        std::vector<double> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
        return DiscreteDist(std::move(labels),
                            std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
    }
};

inline void require_aligned(const DiscreteDist& q, const DiscreteDist& p) {
    if (q.size() != p.size())
        throw std::invalid_argument("divergence: supports are not aligned");
}

/// Relative entropy R(q || p) in nats; +inf when q is not absolutely
/// continuous w.r.t. p. 0 log(0/x) is taken as 0.
inline double relative_entropy(const DiscreteDist& q, const DiscreteDist& p) {
    require_aligned(q, p);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.probs[i] == 0.0) continue;
        if (p.probs[i] == 0.0) return kInf;
        s += q.probs[i] * std::log(q.probs[i] / p.probs[i]);
    }
    return s;
}

/// chi^2 divergence sum (q/p - 1)^2 p; +inf when q !<< p.
inline double chi_squared(const DiscreteDist& q, const DiscreteDist& p) {
    require_aligned(q, p);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (p.probs[i] == 0.0) {
            if (q.probs[i] > 0.0) return kInf;
            continue;
        }
        const double r = q.probs[i] / p.probs[i] - 1.0;
        s += r * r * p.probs[i];
    }
    return s;
}

/// Total variation distance, (1/2) L1 for discrete measures.
inline double total_variation(const DiscreteDist& q, const DiscreteDist& p) {
    require_aligned(q, p);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += std::abs(q.probs[i] - p.probs[i]);
    return 0.5 * s;
}

/// Csiszar-Kullback-Pinsker weak-error bound ||f||_inf sqrt(2 rho^2).
inline double ckp_bound(double f_sup_norm, double rho2) {
    if (f_sup_norm < 0.0) throw std::invalid_argument("ckp_bound: negative sup norm");
    if (rho2 < 0.0) throw std::invalid_argument("ckp_bound: negative relative entropy");
    return f_sup_norm * std::sqrt(2.0 * rho2);
}

/// Cauchy-Schwarz weak-error bound sqrt(Var_p f) sqrt(chi^2).
inline double chi2_comparison_bound(double var_p_f, double chi2) {
    if (var_p_f < 0.0) throw std::invalid_argument("chi2_comparison_bound: negative variance");
    if (chi2 < 0.0) throw std::invalid_argument("chi2_comparison_bound: negative divergence");
    return std::sqrt(var_p_f) * std::sqrt(chi2);
}

/// Leading small-rho^2 term of the goal-oriented bounds,
/// sqrt(Var_p f) sqrt(2 rho^2).
inline double linearized_xi(double var_p_f, double rho2) {
    if (var_p_f < 0.0) throw std::invalid_argument("linearized_xi: negative variance");
    if (rho2 < 0.0) throw std::invalid_argument("linearized_xi: negative relative entropy");
    return std::sqrt(var_p_f) * std::sqrt(2.0 * rho2);
}

} // namespace uqsa
