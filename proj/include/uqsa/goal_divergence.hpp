#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "uqsa/cgf.hpp"
#include "uqsa/divergence.hpp"
#include "uqsa/math.hpp"

namespace uqsa {

/// Goal-oriented divergence bounds on E_Q[f] - E_P[f] for a relative-entropy
/// budget rho2 = R(Q || P). xi_plus >= 0 and xi_minus <= 0 always; both vanish
/// iff rho2 = 0 or f is P-a.s. constant. When the budget exceeds sup Phi of a
/// bounded observable the bound saturates at the essential-range gap and the
/// optimizing c is absent.
struct GoalDivergence {
    double xi_plus = 0.0;
    double xi_minus = 0.0;
    std::optional<double> c_star_plus;
    std::optional<double> c_star_minus;
    double rho2 = 0.0;
    bool saturated_plus = false;
    bool saturated_minus = false;
};

struct CStarResult {
    double c = 0.0;
    bool saturated = false;
};

namespace detail {

inline double phi_at(const CgfHandle& h, double c) {
    const double v = h.value(c);
    if (!std::isfinite(v)) return kInf;
    const double d = h.deriv(c);
    const double phi = -v + c * d;
    if (std::isnan(phi)) return kInf;
    return phi;
}

// Geometric bracket growth from 1e-3. Returns {lo, hi} with
// phi(lo) <= rho2 <= phi(hi), or saturation when phi stays below rho2.
struct Bracket {
    double lo = 0.0, hi = 0.0;
    bool saturated = false;
};

inline Bracket bracket_phi(const CgfHandle& h, double rho2) {
    double lo = 0.0;
    double hi = 1e-3;
    const double cap = std::isfinite(h.domain_plus()) ? h.domain_plus() : 1e250;
    double phi_prev = 0.0;
    for (int i = 0; i < 900; ++i) {
        const double probe = std::min(hi, cap);
        const double phi = phi_at(h, probe);
        if (phi >= rho2) return {lo, probe, false};
        if (probe >= cap) break;
        // bounded observables: Phi stalls relative to itself below rho2.
        // In the unbounded (locally quadratic) regime it quadruples per
        // doubling at any observable scale, so this cannot fire early.
        if (phi > 0.0 && phi - phi_prev <= 1e-12 * phi && hi > 1e-2) break;
        phi_prev = phi;
        lo = probe;
        hi *= 2.0;
    }
    if (std::isfinite(h.ess_sup_gap())) return {lo, hi, true};
    throw std::runtime_error("solve_c_star: failed to bracket Phi (non-finite CGF range)");
}

} // namespace detail

/// Solves Phi(c) = -value(c) + c deriv(c) = rho2 on (0, c-bar) by bracketed
/// bisection with a Newton polish. Phi is strictly increasing there, which is
/// asserted at every bisection step. Tolerance: |Phi(c*) - rho2| <=
/// 1e-10 max(1, rho2). Returns saturated = true when rho2 >= sup Phi.
inline CStarResult solve_c_star(const CgfHandle& h, double rho2) {
    if (!(rho2 >= 0.0)) throw std::invalid_argument("solve_c_star: rho2 must be >= 0");
    if (rho2 == 0.0) return {0.0, false};
    if (rho2 >= h.sup_phi()) return {kInf, true};
    if (!std::isfinite(h.value(std::min(1e-3, 0.5 * h.domain_plus()))))
        throw std::runtime_error("solve_c_star: non-finite CGF at initial bracket");

    auto br = detail::bracket_phi(h, rho2);
    if (br.saturated) return {kInf, true};
    double lo = br.lo, hi = br.hi;
    double phi_lo = detail::phi_at(h, lo);
    double phi_hi = detail::phi_at(h, hi);
    const double mono_tol = 1e-9 * std::max(1.0, rho2);
    int iters = 0;
    while (hi - lo > 1e-13 * hi && hi - lo > 1e-300 && iters < 200) {
        ++iters;
        const double mid = 0.5 * (lo + hi);
        const double phi_mid = detail::phi_at(h, mid);
        // monotonicity of Phi on the bracket
        if (phi_mid < phi_lo - mono_tol ||
            (std::isfinite(phi_hi) && phi_mid > phi_hi + mono_tol))
            throw std::runtime_error("solve_c_star: Phi is not increasing on the bracket");
        if (phi_mid < rho2) {
            lo = mid;
            phi_lo = phi_mid;
        } else {
            hi = mid;
            phi_hi = phi_mid;
        }
    }
    // Newton polish on Phi(c) - rho2 with Phi'(c) = c Lambda''(c), keeping
    // the best iterate seen
    double c = 0.5 * (lo + hi);
    double best_c = c;
    double best_r = std::abs(detail::phi_at(h, c) - rho2);
    for (int k = 0; k < 12 && best_r > 1e-14 * rho2; ++k) {
        const double r = detail::phi_at(h, c) - rho2;
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best_c = c;
        }
        const double dphi = c * h.second_deriv(c);
        if (!(dphi > 0.0)) break;
        const double next = c - r / dphi;
        if (next <= lo || next >= hi || !std::isfinite(next) || next == c) break;
        c = next;
    }
    if (best_r > 1e-10 * std::max(1.0, rho2))
        throw std::runtime_error("solve_c_star: solver tolerance not met");
    return {best_c, false};
}

/// Independent pure-bisection solve (no Newton step, fresh bracket).
/// Used to cross-check the production solver through the representation
/// identity xi_plus = deriv(Phi^{-1}(rho2)).
inline CStarResult solve_c_star_bisect(const CgfHandle& h, double rho2,
                                       int max_iters = 400) {
    if (!(rho2 >= 0.0)) throw std::invalid_argument("solve_c_star_bisect: rho2 must be >= 0");
    if (rho2 == 0.0) return {0.0, false};
    if (rho2 >= h.sup_phi()) return {kInf, true};
    auto br = detail::bracket_phi(h, rho2);
    if (br.saturated) return {kInf, true};
    double lo = br.lo, hi = br.hi;
    // termination is relative to the bracket location so the root is
    // resolved equally well for optimizers at any observable scale
    for (int i = 0; i < max_iters && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (detail::phi_at(h, mid) < rho2 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), false};
}

/// Upper and lower goal-oriented divergence bounds for budget rho2.
/// xi_plus = deriv(c*_+); the lower bound solves the mirrored problem, so
/// xi_minus = -deriv_mirror(c*_-) = deriv(-c*_-). Saturated sides report the
/// essential-range gap instead.
inline GoalDivergence xi_bounds(const CgfHandle& h, double rho2) {
    if (!(rho2 >= 0.0)) throw std::invalid_argument("xi_bounds: rho2 must be >= 0");
    GoalDivergence g;
    g.rho2 = rho2;
    if (rho2 == 0.0) {
        g.c_star_plus = 0.0;
        g.c_star_minus = 0.0;
        return g;
    }
    const auto plus = solve_c_star(h, rho2);
    if (plus.saturated) {
        g.saturated_plus = true;
        g.xi_plus = h.ess_sup_gap();
    } else {
        g.c_star_plus = plus.c;
        g.xi_plus = h.deriv(plus.c);
    }
    const CgfHandle m = h.mirrored();
    const auto minus = solve_c_star(m, rho2);
    if (minus.saturated) {
        g.saturated_minus = true;
        g.xi_minus = -m.ess_sup_gap();
    } else {
        g.c_star_minus = minus.c;
        g.xi_minus = -m.deriv(minus.c);
    }
    return g;
}

/// Two-sided weak-error sandwich for finite distributions:
/// xi_minus <= E_q f - E_p f <= xi_plus, with the exact CGF built under p.
struct SandwichResult {
    double lower = 0.0;
    double gap = 0.0;
    double upper = 0.0;
    GoalDivergence details;
};

inline SandwichResult uq_sandwich(const DiscreteDist& p, const DiscreteDist& q,
                                  std::span<const double> f_on_support) {
    const double rho2 = relative_entropy(q, p);
    if (!std::isfinite(rho2))
        throw std::domain_error("uq_sandwich: infinite relative entropy");
    if (f_on_support.size() != p.size())
        throw std::invalid_argument("uq_sandwich: observable length mismatch");
    const CgfHandle h = CgfHandle::from_discrete(p, f_on_support);
    SandwichResult r;
    r.details = xi_bounds(h, rho2);
    r.lower = r.details.xi_minus;
    r.upper = r.details.xi_plus;
    double eq = 0.0, ep = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        eq += q.probs[i] * f_on_support[i];
        ep += p.probs[i] * f_on_support[i];
    }
    r.gap = eq - ep;
    return r;
}

namespace detail {

// max of the concave map c -> c t - psi(c) over c > 0, by golden section
// on an expanding bracket.
inline double legendre_value(const std::function<double(double)>& psi, double t) {
    auto v = [&](double c) {
        const double p = psi(c);
        return std::isfinite(p) ? c * t - p : -kInf;
    };
    if (v(1e-9) == -kInf)
        throw std::domain_error("psi_sharp_bound: psi is non-finite on the positive axis");
    // expand until the concave map starts decreasing (peak bracketed) or the
    // probe leaves psi's finiteness domain; golden section tolerates the
    // -inf tail that remains inside the bracket in the latter case.
    double hi = 1e-9;
    double prev = 0.0;
    while (hi < 1e14) {
        const double vn = v(hi * 2.0);
        hi *= 2.0;
        if (vn == -kInf || vn < prev) break;
        prev = vn;
    }
    // golden section on [0, hi]
    const double gr = 0.6180339887498948482;
    double a = 0.0, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = v(x1), f2 = v(x2);
    for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, b); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = v(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = v(x1);
        }
    }
    return std::max(0.0, std::max(f1, f2));
}

} // namespace detail

/// Weak-error bound from a convex upper envelope Psi of the centered CGF
/// (Psi(0) = Psi'(0) = 0): returns the generalized inverse of the
/// Legendre transform, Psi-sharp(rho2) = inf { t >= 0 : Psi*(t) >= rho2 }.
/// For Psi(c) = c^2 sigma^2 / 2 this is sigma sqrt(2 rho2).
inline double psi_sharp_bound(const std::function<double(double)>& psi, double rho2) {
    if (!(rho2 >= 0.0)) throw std::invalid_argument("psi_sharp_bound: rho2 must be >= 0");
    if (rho2 == 0.0) return 0.0;
    auto star = [&](double t) { return detail::legendre_value(psi, t); };
    double t_hi = 1e-3;
    int guard = 0;
    while (star(t_hi) < rho2 && guard++ < 200) t_hi *= 2.0;
    if (guard >= 200)
        throw std::runtime_error("psi_sharp_bound: Legendre transform never reaches rho2");
    double t_lo = 0.0;
    for (int i = 0; i < 200 && t_hi - t_lo > 1e-10 * std::max(1.0, t_hi); ++i) {
        const double mid = 0.5 * (t_lo + t_hi);
        (star(mid) < rho2 ? t_lo : t_hi) = mid;
    }
    return 0.5 * (t_lo + t_hi);
}

} // namespace uqsa
