#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "uqsa/linalg.hpp"

namespace uqsa {

enum class FisherProvenance { static_measure, path, path_euler };

inline const char* to_string(FisherProvenance p) {
    switch (p) {
        case FisherProvenance::static_measure: return "static";
        case FisherProvenance::path: return "path";
        default: return "path-euler";
    }
}

/// Symmetric k-by-k information matrix with provenance and, for Monte Carlo
/// estimates, per-entry standard errors (zero for exact evaluations).
struct FisherMatrix {
    SquareMatrix entries;
    SquareMatrix stderr_;
    FisherProvenance provenance = FisherProvenance::static_measure;

    FisherMatrix() = default;
    explicit FisherMatrix(int k, FisherProvenance prov = FisherProvenance::static_measure)
        : entries(k), stderr_(k), provenance(prov) {}

    int dim() const { return entries.n; }

    double quad(std::span<const double> v) const { return quad_form(entries, v); }

    /// Smallest eigenvalue of the symmetrized matrix; PSD check helper.
    double min_eig() const { return min_eigenvalue(entries); }
};

/// Streaming mean/stderr accumulator for matrix-valued Monte Carlo estimands.
/// Merging is associative, so per-worker accumulators can be combined in
/// path-index order for reproducible parallel estimates.
class FisherAccumulator {
public:
    explicit FisherAccumulator(int k) : k_(k), sum_(k), sumsq_(k) {}

    int dim() const { return k_; }
    long count() const { return n_; }

    /// Adds the outer product g g^T of a score/gradient sample.
    void add_outer(std::span<const double> g) {
        if (static_cast<int>(g.size()) != k_)
            throw std::invalid_argument("FisherAccumulator: gradient dimension mismatch");
        for (double x : g)
            if (!std::isfinite(x))
                throw std::runtime_error("FisherAccumulator: non-finite gradient sample");
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) {
                const double o = g[i] * g[j];
                sum_(i, j) += o;
                sumsq_(i, j) += o * o;
            }
        ++n_;
    }

    /// Adds one matrix-valued sample (e.g. a state-conditional expectation).
    void add_matrix(const SquareMatrix& m) {
        if (m.n != k_) throw std::invalid_argument("FisherAccumulator: dimension mismatch");
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) {
                if (!std::isfinite(m(i, j)))
                    throw std::runtime_error("FisherAccumulator: non-finite matrix sample");
                sum_(i, j) += m(i, j);
                sumsq_(i, j) += m(i, j) * m(i, j);
            }
        ++n_;
    }

    void merge(const FisherAccumulator& other) {
        if (other.k_ != k_) throw std::invalid_argument("FisherAccumulator: dimension mismatch");
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) {
                sum_(i, j) += other.sum_(i, j);
                sumsq_(i, j) += other.sumsq_(i, j);
            }
        n_ += other.n_;
    }

    /// Sample mean (symmetrized; Monte Carlo asymmetry is pure noise) with
    /// per-entry standard errors.
    FisherMatrix finalize(FisherProvenance prov) const {
        if (n_ < 2) throw std::runtime_error("FisherAccumulator: need at least 2 samples");
        FisherMatrix f(k_, prov);
        const double n = static_cast<double>(n_);
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) {
                const double m = sum_(i, j) / n;
                f.entries(i, j) = m;
                const double var = std::max(0.0, sumsq_(i, j) / n - m * m);
                f.stderr_(i, j) = std::sqrt(var / (n - 1.0));
            }
        f.entries = symmetrized(f.entries);
        return f;
    }

private:
    int k_;
    long n_ = 0;
    SquareMatrix sum_, sumsq_;
};

/// Exact matrix wrapper (zero standard errors).
inline FisherMatrix exact_fisher(SquareMatrix m, FisherProvenance prov) {
    FisherMatrix f(m.n, prov);
    f.entries = symmetrized(m);
    return f;
}

} // namespace uqsa
