#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace uqsa {

/// Dense row-major k-by-k matrix, small k (parameter dimensions).
struct SquareMatrix {
    int n = 0;
    std::vector<double> a; // n*n row-major

    SquareMatrix() = default;
    explicit SquareMatrix(int k) : n(k), a(static_cast<std::size_t>(k) * k, 0.0) {
        if (k < 0) throw std::invalid_argument("SquareMatrix: negative dimension");
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline SquareMatrix symmetrized(const SquareMatrix& m) {
    SquareMatrix s(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

inline double max_asymmetry(const SquareMatrix& m) {
    double w = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) w = std::max(w, std::abs(m(i, j) - m(j, i)));
    return w;
}

inline double quad_form(const SquareMatrix& m, std::span<const double> v) {
    if (static_cast<int>(v.size()) != m.n)
        throw std::invalid_argument("quad_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s += v[i] * m(i, j) * v[j];
    return s;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(const SquareMatrix& m, double tol = 1e-14) {
    SquareMatrix s = symmetrized(m);
    const int n = s.n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (off < tol * tol) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = s(k, p), akq = s(k, q);
                    s(k, p) = c * akp - sn * akq;
                    s(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = s(p, k), aqk = s(q, k);
                    s(p, k) = c * apk - sn * aqk;
                    s(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = s(i, i);
    return ev;
}

inline double min_eigenvalue(const SquareMatrix& m) {
    const auto ev = symmetric_eigenvalues(m);
    double lo = ev.empty() ? 0.0 : ev[0];
    for (double e : ev) lo = std::min(lo, e);
    return lo;
}

/// Determinant by partially pivoted Gaussian elimination.
inline double determinant(SquareMatrix m) {
    const int n = m.n;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

/// Solve m x = b in place; throws on (numerically) singular systems.
inline std::vector<double> solve(SquareMatrix m, std::vector<double> b) {
    const int n = m.n;
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: dimension mismatch");
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) throw std::runtime_error("solve: singular matrix");
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(c)]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j) s -= m(r, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(r)] = s / m(r, r);
    }
    return b;
}

} // namespace uqsa
