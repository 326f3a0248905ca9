#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uqsa/cgf.hpp"
#include "uqsa/fisher.hpp"
#include "uqsa/goal_divergence.hpp"
#include "uqsa/markov.hpp"
#include "uqsa/math.hpp"
#include "uqsa/rng.hpp"
#include "uqsa/simulate.hpp"

namespace uqsa {

// ---------------------------------------------------------------------------
// Relative entropy rate
// ---------------------------------------------------------------------------

/// RER of two finite-state chains: sum_x nu(x) R(q(x,.) || p(x,.)), with nu
/// stationary for q. Returns +inf on a rowwise absolute-continuity violation.
inline double rer_dtmc(const FiniteDtmc& q, const FiniteDtmc& p, std::span<const double> nu) {
    q.validate();
    p.validate();
    if (q.n_states != p.n_states || static_cast<int>(nu.size()) != q.n_states)
        throw std::invalid_argument("rer_dtmc: state space mismatch");
    double total = 0.0;
    for (int x = 0; x < q.n_states; ++x) {
        if (nu[x] == 0.0) continue;
        double row = 0.0;
        for (int y = 0; y < q.n_states; ++y) {
            const double qq = q.p(x, y);
            if (qq == 0.0) continue;
            if (p.p(x, y) == 0.0) return kInf;
            row += qq * std::log(qq / p.p(x, y));
        }
        total += nu[x] * row;
    }
    return total;
}

/// Ergodic Monte Carlo RER estimate for general kernels: average of
/// log q(x,y) - log p(x,y) over x ~ nu_q, y ~ q(x,.).
inline MeanStderr rer_dtmc_mc(const DtmcSpec& q, const DtmcSpec& p, int n_samples,
                              std::uint64_t seed) {
    if (!q.sample_stationary || !q.sample_next || !q.log_kernel || !p.log_kernel)
        throw std::invalid_argument("rer_dtmc_mc: missing samplers or kernel densities");
    if (n_samples < 2) throw std::invalid_argument("rer_dtmc_mc: need n_samples >= 2");
    RngStream rng(seed);
    std::vector<double> terms(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double x = q.sample_stationary(rng);
        const double y = q.sample_next(rng, x);
        terms[static_cast<std::size_t>(i)] = q.log_kernel(x, y) - p.log_kernel(x, y);
    }
    return mean_with_stderr(terms);
}

/// Exact path Fisher information of a finite chain under stationary mu:
/// sum_x mu(x) sum_y p(x,y) score score^T.
inline FisherMatrix pfim_dtmc_exact(const FiniteDtmc& chain, std::span<const double> mu) {
    chain.validate();
    if (!chain.grad_log_kernel || chain.dim_theta <= 0)
        throw std::invalid_argument("pfim_dtmc_exact: chain has no parameter gradients");
    FisherMatrix f(chain.dim_theta, FisherProvenance::path);
    for (int x = 0; x < chain.n_states; ++x) {
        if (mu[x] == 0.0) continue;
        for (int y = 0; y < chain.n_states; ++y) {
            const double w = mu[x] * chain.p(x, y);
            if (w == 0.0) continue;
            const auto g = chain.grad_log_kernel(x, y);
            for (int i = 0; i < chain.dim_theta; ++i)
                for (int j = 0; j < chain.dim_theta; ++j)
                    f.entries(i, j) += w * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)];
        }
    }
    return f;
}

/// Monte Carlo path FIM for a general kernel: mean of score outer products
/// over x ~ stationary, y ~ p(x,.).
inline FisherMatrix pfim_dtmc(const DtmcSpec& spec, int n_samples, std::uint64_t seed) {
    if (!spec.sample_stationary || !spec.sample_next || !spec.grad_log_kernel)
        throw std::invalid_argument("pfim_dtmc: missing samplers or gradients");
    if (n_samples < 2) throw std::invalid_argument("pfim_dtmc: need n_samples >= 2");
    RngStream rng(seed);
    FisherAccumulator acc(spec.dim_theta);
    for (int i = 0; i < n_samples; ++i) {
        const double x = spec.sample_stationary(rng);
        const double y = spec.sample_next(rng, x);
        acc.add_outer(spec.grad_log_kernel(x, y));
    }
    return acc.finalize(FisherProvenance::path);
}

/// Per-unit-time path FIM of a time-discretized chain: the one-step FIM
/// divided by the step size, making it dimensionally a rate.
inline FisherMatrix pfim_euler(const DtmcSpec& spec, double dt, int n_samples,
                               std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("pfim_euler: dt must be > 0");
    FisherMatrix f = pfim_dtmc(spec, n_samples, seed);
    f.provenance = FisherProvenance::path_euler;
    for (auto& v : f.entries.a) v /= dt;
    for (auto& v : f.stderr_.a) v /= dt;
    return f;
}

/// CTMC relative entropy rate, jump form:
///   sum mu~(x) lq(x) pq(x,x') log[lq pq / (lp pp)] - sum mu~(x) (lq(x) - lp(x)).
/// +inf when q jumps where p cannot.
inline double rer_ctmc(const CtmcSpec& q, const CtmcSpec& p, std::span<const double> mu_q) {
    q.validate();
    p.validate();
    if (q.n_states != p.n_states || static_cast<int>(mu_q.size()) != q.n_states)
        throw std::invalid_argument("rer_ctmc: state space mismatch");
    double log_term = 0.0, rate_term = 0.0;
    for (int x = 0; x < q.n_states; ++x) {
        if (mu_q[x] == 0.0) continue;
        double lam_q = 0.0, lam_p = 0.0;
        for (int y = 0; y < q.n_states; ++y) {
            const double cq = q.c(x, y);
            const double cp = p.c(x, y);
            lam_q += cq;
            lam_p += cp;
            if (cq == 0.0) continue;
            if (cp == 0.0) return kInf;
            log_term += mu_q[x] * cq * std::log(cq / cp);
        }
        rate_term += mu_q[x] * (lam_q - lam_p);
    }
    return log_term - rate_term;
}

/// Same RER through the nonnegative integrand l(z) = z log z - z + 1:
/// sum mu~(x) cp(x,x') l(cq/cp). Every summand is >= 0 and vanishes iff the
/// rates agree, which makes nonnegativity assertable term by term.
inline double rer_ctmc_lform(const CtmcSpec& q, const CtmcSpec& p,
                             std::span<const double> mu_q) {
    q.validate();
    p.validate();
    if (q.n_states != p.n_states || static_cast<int>(mu_q.size()) != q.n_states)
        throw std::invalid_argument("rer_ctmc_lform: state space mismatch");
    auto ell = [](double z) { return z <= 0.0 ? 1.0 : z * std::log(z) - z + 1.0; };
    double total = 0.0;
    for (int x = 0; x < q.n_states; ++x) {
        if (mu_q[x] == 0.0) continue;
        for (int y = 0; y < q.n_states; ++y) {
            const double cq = q.c(x, y);
            const double cp = p.c(x, y);
            if (cp == 0.0) {
                if (cq > 0.0) return kInf;
                continue;
            }
            total += mu_q[x] * cp * ell(cq / cp);
        }
    }
    return total;
}

namespace detail {

inline void ctmc_score_matrix(const CtmcSpec& spec, int x, SquareMatrix& out) {
    for (auto& v : out.a) v = 0.0;
    for (int y = 0; y < spec.n_states; ++y) {
        const double rate = spec.c(x, y);
        const auto g = spec.grad_log_rate(x, y);
        if (rate == 0.0) {
            for (double gi : g)
                if (gi != 0.0)
                    throw std::invalid_argument("pfim_ctmc: zero rate with nonzero gradient");
            continue;
        }
        for (int i = 0; i < spec.dim_theta; ++i)
            for (int j = 0; j < spec.dim_theta; ++j)
                out(i, j) += rate * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)];
    }
}

} // namespace detail

/// Exact CTMC path FIM under stationary mu:
/// E_mu[ sum_x' c(x,x') score score^T ].
inline FisherMatrix pfim_ctmc_exact(const CtmcSpec& spec, std::span<const double> mu) {
    spec.validate();
    if (!spec.grad_log_rate || spec.dim_theta <= 0)
        throw std::invalid_argument("pfim_ctmc_exact: spec has no parameter gradients");
    FisherMatrix f(spec.dim_theta, FisherProvenance::path);
    SquareMatrix g(spec.dim_theta);
    for (int x = 0; x < spec.n_states; ++x) {
        if (mu[x] == 0.0) continue;
        detail::ctmc_score_matrix(spec, x, g);
        for (std::size_t i = 0; i < g.a.size(); ++i) f.entries.a[i] += mu[x] * g.a[i];
    }
    return f;
}

/// Path FIM estimated from an SSA ensemble: per-path time averages of the
/// state-conditional score matrix, averaged across paths with batch errors.
inline FisherMatrix pfim_ctmc_from_ensemble(const CtmcSpec& spec, const PathEnsemble& e) {
    if (e.kind != PathEnsemble::Kind::events)
        throw std::invalid_argument("pfim_ctmc_from_ensemble: need an event ensemble");
    if (!spec.grad_log_rate) throw std::invalid_argument("pfim_ctmc_from_ensemble: no gradients");
    FisherAccumulator acc(spec.dim_theta);
    SquareMatrix g(spec.dim_theta), path_avg(spec.dim_theta);
    for (const auto& p : e.paths) {
        for (auto& v : path_avg.a) v = 0.0;
        for (std::size_t i = 0; i < p.t.size(); ++i) {
            const double t_end = (i + 1 < p.t.size()) ? p.t[i + 1] : e.horizon;
            const double w = (t_end - p.t[i]) / e.horizon;
            detail::ctmc_score_matrix(spec, static_cast<int>(p.x[i]), g);
            for (std::size_t k = 0; k < g.a.size(); ++k) path_avg.a[k] += w * g.a[k];
        }
        acc.add_matrix(path_avg);
    }
    return acc.finalize(FisherProvenance::path);
}

/// Monte Carlo path FIM from a single long SSA trajectory with roughly
/// n_jumps jump samples, time-weighted and batched for standard errors.
inline FisherMatrix pfim_ctmc(const CtmcSpec& spec, long n_jumps, std::uint64_t seed) {
    spec.validate();
    if (n_jumps < 100) throw std::invalid_argument("pfim_ctmc: need at least 100 jumps");
    RngStream rng(seed);
    int state = spec.stationary.empty() ? spec.initial_state : rng.categorical(spec.stationary);
    const int n = spec.n_states;
    const int n_batches = 50;
    const long per_batch = n_jumps / n_batches;
    FisherAccumulator acc(spec.dim_theta);
    SquareMatrix g(spec.dim_theta), batch(spec.dim_theta);
    for (int b = 0; b < n_batches; ++b) {
        for (auto& v : batch.a) v = 0.0;
        double batch_time = 0.0;
        for (long j = 0; j < per_batch; ++j) {
            const double lam = spec.exit_rate(state);
            if (!(lam > 0.0)) throw std::runtime_error("pfim_ctmc: absorbing state reached");
            const double hold = rng.exponential(lam);
            detail::ctmc_score_matrix(spec, state, g);
            for (std::size_t k = 0; k < g.a.size(); ++k) batch.a[k] += hold * g.a[k];
            batch_time += hold;
            state = rng.categorical(
                std::span<const double>(spec.rates.data() + static_cast<std::size_t>(state) * n,
                                        static_cast<std::size_t>(n)));
        }
        for (auto& v : batch.a) v /= batch_time;
        acc.add_matrix(batch);
    }
    return acc.finalize(FisherProvenance::path);
}

/// Transient path FIM over [0, T] from Girsanov scores: E[s s^T] with
/// s = sum_jumps grad log c  -  int_0^T sum_x' grad c(X_t, x') dt.
/// Divided by T it converges to the stationary path FIM.
inline FisherMatrix pfim_ctmc_transient(const CtmcSpec& spec, const PathEnsemble& e) {
    if (e.kind != PathEnsemble::Kind::events)
        throw std::invalid_argument("pfim_ctmc_transient: need an event ensemble");
    const int k = spec.dim_theta;
    FisherAccumulator acc(k);
    std::vector<double> score(static_cast<std::size_t>(k));
    for (const auto& p : e.paths) {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t i = 0; i < p.t.size(); ++i) {
            const int x = static_cast<int>(p.x[i]);
            const double t_end = (i + 1 < p.t.size()) ? p.t[i + 1] : e.horizon;
            const double hold = t_end - p.t[i];
            for (int y = 0; y < spec.n_states; ++y) {
                const double rate = spec.c(x, y);
                if (rate == 0.0) continue;
                const auto g = spec.grad_log_rate(x, y);
                for (int j = 0; j < k; ++j)
                    score[static_cast<std::size_t>(j)] -= hold * rate * g[static_cast<std::size_t>(j)];
            }
            if (i + 1 < p.t.size()) {
                const auto g = spec.grad_log_rate(x, static_cast<int>(p.x[i + 1]));
                for (int j = 0; j < k; ++j) score[static_cast<std::size_t>(j)] += g[static_cast<std::size_t>(j)];
            }
        }
        acc.add_outer(score);
    }
    return acc.finalize(FisherProvenance::path);
}

/// Girsanov RER between diffusions sharing the diffusion field:
/// E_nu[(1/2) |a - b|^2_{Sigma^{-1}}] over stationary samples of the first
/// model. Differing diffusion fields make the path measures mutually
/// singular; that case returns +inf.
inline MeanStderr rer_sde(const SdeSpec& q_model, const SdeSpec& p_model,
                          const std::vector<std::vector<double>>& stationary_samples) {
    if (q_model.dim != p_model.dim) throw std::invalid_argument("rer_sde: dimension mismatch");
    if (stationary_samples.empty()) throw std::invalid_argument("rer_sde: no samples");
    const int d = q_model.dim;
    std::vector<double> a(static_cast<std::size_t>(d)), b(static_cast<std::size_t>(d));
    std::vector<double> sq(static_cast<std::size_t>(d) * d), sp(static_cast<std::size_t>(d) * d);
    std::vector<double> terms;
    terms.reserve(stationary_samples.size());
    for (const auto& x : stationary_samples) {
        q_model.diffusion(x, sq);
        p_model.diffusion(x, sp);
        for (std::size_t i = 0; i < sq.size(); ++i) {
            const double scale = std::max({1.0, std::abs(sq[i]), std::abs(sp[i])});
            if (std::abs(sq[i] - sp[i]) > 1e-9 * scale) return {kInf, 0.0};
        }
        q_model.drift(x, a);
        p_model.drift(x, b);
        for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] -= b[static_cast<std::size_t>(i)];
        const SquareMatrix cov = q_model.covariance(x);
        const auto u = solve(cov, a);
        double quad = 0.0;
        for (int i = 0; i < d; ++i) quad += a[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
        terms.push_back(0.5 * quad);
    }
    return mean_with_stderr(terms);
}

/// Diffusion path FIM E[(grad_theta a)^T Sigma^{-1} (grad_theta a)] over
/// stationary samples.
inline FisherMatrix pfim_sde(const SdeSpec& m, const std::vector<std::vector<double>>& samples) {
    if (!m.grad_drift || m.dim_theta <= 0)
        throw std::invalid_argument("pfim_sde: model has no drift gradients");
    if (samples.size() < 2) throw std::invalid_argument("pfim_sde: need at least 2 samples");
    const int d = m.dim, k = m.dim_theta;
    FisherAccumulator acc(k);
    std::vector<double> jac(static_cast<std::size_t>(d) * k);
    SquareMatrix sample(k);
    for (const auto& x : samples) {
        m.grad_drift(x, jac);
        const SquareMatrix cov = m.covariance(x);
        // sample = J^T Sigma^{-1} J, column by column
        for (int j = 0; j < k; ++j) {
            std::vector<double> col(static_cast<std::size_t>(d));
            for (int r = 0; r < d; ++r) col[static_cast<std::size_t>(r)] = jac[static_cast<std::size_t>(r) * k + j];
            const auto w = solve(cov, col);
            for (int i = 0; i < k; ++i) {
                double acc_ij = 0.0;
                for (int r = 0; r < d; ++r) acc_ij += jac[static_cast<std::size_t>(r) * k + i] * w[static_cast<std::size_t>(r)];
                sample(i, j) = acc_ij;
            }
        }
        acc.add_matrix(sample);
    }
    return acc.finalize(FisherProvenance::path);
}

// ---------------------------------------------------------------------------
// Integrated autocorrelation time
// ---------------------------------------------------------------------------

/// Windowed IAT: dt (A(0) + 2 sum_{k>=1} (1 - k dt / T) A(k dt)), lags up to
/// T. Pass T = inf for the untruncated limit. acf[k] is the autocovariance at
/// lag k dt; dt = 1 recovers the discrete-time formula.
inline double iat_finite(std::span<const double> acf, double T, double dt = 1.0) {
    if (acf.empty()) throw std::invalid_argument("iat_finite: empty ACF");
    if (!(dt > 0.0)) throw std::invalid_argument("iat_finite: dt must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("iat_finite: T must be > 0");
    double tau = acf[0];
    if (std::isfinite(T)) {
        const auto k_max = static_cast<std::size_t>(std::floor(T / dt + 1e-9));
        if (k_max >= acf.size())
            throw std::invalid_argument("iat_finite: T exceeds available lags");
        for (std::size_t k = 1; k <= k_max; ++k)
            tau += 2.0 * (1.0 - static_cast<double>(k) * dt / T) * acf[k];
    } else {
        for (std::size_t k = 1; k < acf.size(); ++k) tau += 2.0 * acf[k];
    }
    return tau * dt;
}

struct IatEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int truncation_lag = 0;
    bool nonstationary_warning = false;
};

/// IAT from an estimated ACF with the initial-positive-sequence rule: lags
/// are summed until the first negative estimate. Standard errors combine the
/// per-lag errors in quadrature (lag correlations ignored).
inline IatEstimate iat_infinite(const AcfSeries& series) {
    if (series.acf.empty()) throw std::invalid_argument("iat_infinite: empty ACF");
    IatEstimate out;
    out.nonstationary_warning = series.mean_drift_warning;
    std::size_t cut = series.acf.size();
    for (std::size_t k = 1; k < series.acf.size(); ++k) {
        if (series.acf[k] < 0.0) {
            cut = k;
            break;
        }
    }
    out.truncation_lag = static_cast<int>(cut) - 1;
    double tau = series.acf[0];
    double var_err = series.stderr_[0] * series.stderr_[0];
    for (std::size_t k = 1; k < cut; ++k) {
        tau += 2.0 * series.acf[k];
        var_err += 4.0 * series.stderr_[k] * series.stderr_[k];
    }
    out.value = tau * series.dt;
    out.stderr_ = std::sqrt(var_err) * series.dt;
    return out;
}

// ---------------------------------------------------------------------------
// Path-space goal-oriented bounds
// ---------------------------------------------------------------------------

/// Finite-horizon path bounds: the CGF of T * F-bar under P_[0,T] is scaled
/// per unit time and paired with budget path_relent / T.
inline GoalDivergence path_xi_bounds(const CgfHandle& cgf_of_scaled_sum, double path_relent,
                                     double T) {
    if (!(T > 0.0)) throw std::invalid_argument("path_xi_bounds: T must be > 0");
    if (!(path_relent >= 0.0))
        throw std::invalid_argument("path_xi_bounds: negative relative entropy");
    return xi_bounds(cgf_of_scaled_sum.scaled_by_time(T), path_relent / T);
}

/// Stationary variant: per-time budget RER + R(nu || mu) / T.
inline GoalDivergence path_xi_bounds_stationary(const CgfHandle& cgf_of_scaled_sum,
                                                double rer, double init_relent, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("path_xi_bounds_stationary: T must be > 0");
    return xi_bounds(cgf_of_scaled_sum.scaled_by_time(T), rer + init_relent / T);
}

// ---------------------------------------------------------------------------
// Perron-Frobenius limiting CGF
// ---------------------------------------------------------------------------

struct PfEigen {
    double log_lambda = 0.0;
    double dlog_lambda_dc = 0.0;
};

/// Principal eigenvalue of the tilted matrix pi_f(x,y;c) = p(x,y) e^{c f(y)}
/// by power iteration (tolerance 1e-12), plus d log lambda / dc from the
/// left/right eigenvectors. Reducible chains stall and raise an error.
inline PfEigen pf_eigen(const FiniteDtmc& chain, std::span<const double> f, double c) {
    chain.validate();
    const int n = chain.n_states;
    if (static_cast<int>(f.size()) != n) throw std::invalid_argument("pf_eigen: f length mismatch");
    std::vector<double> tilt(static_cast<std::size_t>(n));
    double fmax = f[0];
    for (double v : f) fmax = std::max(fmax, v);
    for (int y = 0; y < n; ++y) tilt[static_cast<std::size_t>(y)] = std::exp(c * (f[y] - fmax));

    auto iterate = [&](bool transpose, std::vector<double>& vec) -> double {
        double lambda = 0.0;
        std::vector<double> next(static_cast<std::size_t>(n));
        for (int it = 0; it < 200000; ++it) {
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double pij = transpose
                                           ? chain.p(j, i) * tilt[static_cast<std::size_t>(i)]
                                           : chain.p(i, j) * tilt[static_cast<std::size_t>(j)];
                    s += pij * vec[static_cast<std::size_t>(j)];
                }
                next[static_cast<std::size_t>(i)] = s;
            }
            double norm = 0.0;
            for (double v : next) norm += std::abs(v);
            if (!(norm > 0.0)) throw std::runtime_error("pf_eigen: matrix is reducible");
            double diff = 0.0;
            for (int i = 0; i < n; ++i) {
                next[static_cast<std::size_t>(i)] /= norm;
                diff += std::abs(next[static_cast<std::size_t>(i)] - vec[static_cast<std::size_t>(i)]);
            }
            vec.swap(next);
            if (diff < 1e-14 && it > 2) {
                lambda = norm;
                return lambda;
            }
            lambda = norm;
        }
        throw std::runtime_error("pf_eigen: power iteration stagnated (reducible matrix?)");
    };

    std::vector<double> right(static_cast<std::size_t>(n), 1.0 / n);
    std::vector<double> left(static_cast<std::size_t>(n), 1.0 / n);
    const double lam_shift = iterate(false, right);
    iterate(true, left);

    double lr = 0.0, lfr = 0.0;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const double w = left[static_cast<std::size_t>(x)] * chain.p(x, y) *
                             tilt[static_cast<std::size_t>(y)] * right[static_cast<std::size_t>(y)];
            lr += w;
            lfr += w * f[y];
        }
    }
    PfEigen out;
    out.log_lambda = std::log(lam_shift) + c * fmax;
    out.dlog_lambda_dc = lfr / lr;
    return out;
}

/// log lambda(Pi_f(c)).
inline double pf_eigen_cgf(const FiniteDtmc& chain, std::span<const double> f, double c) {
    return pf_eigen(chain, f, c).log_lambda;
}

/// Centered limiting CGF handle of ergodic averages of f under the chain:
/// value(c) = log lambda(Pi_f(c)) - c E_pi[f], with the exact eigen-derivative.
inline CgfHandle pf_limiting_cgf(const FiniteDtmc& chain, std::vector<double> f) {
    const auto pi = dtmc_stationary(chain);
    double m = 0.0;
    double fmin = f.at(0), fmax = f.at(0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        m += pi[i] * f[i];
        fmin = std::min(fmin, f[i]);
        fmax = std::max(fmax, f[i]);
    }
    FiniteDtmc chain_copy = chain;
    auto value = [chain_copy, f, m](double c) {
        return pf_eigen_cgf(chain_copy, f, c) - c * m;
    };
    auto deriv = [chain_copy, f, m](double c) {
        return pf_eigen(chain_copy, f, c).dlog_lambda_dc - m;
    };
    CgfHandle h = CgfHandle::analytic(std::move(value), std::move(deriv), m);
    h.declare_bounded_range(fmax - m, m - fmin, kInf, kInf);
    return h;
}

/// Infinite-horizon bounds from the limiting CGF and the RER. The
/// representation identity xi = deriv(Phi^{-1}(rer)) is re-derived by an
/// independent bisection and enforced to 1e-8 relative.
inline GoalDivergence xi_infinite(const CgfHandle& limiting_cgf, double rer) {
    GoalDivergence g = xi_bounds(limiting_cgf, rer);
    const double tol = 1e-8;
    if (!g.saturated_plus && rer > 0.0) {
        const auto check = solve_c_star_bisect(limiting_cgf, rer);
        const double xi = limiting_cgf.deriv(check.c);
        if (std::abs(xi - g.xi_plus) > tol * std::max(1.0, std::abs(g.xi_plus)))
            throw std::runtime_error("xi_infinite: representation cross-check failed (+)");
    }
    if (!g.saturated_minus && rer > 0.0) {
        const CgfHandle m = limiting_cgf.mirrored();
        const auto check = solve_c_star_bisect(m, rer);
        const double xi = -m.deriv(check.c);
        if (std::abs(xi - g.xi_minus) > tol * std::max(1.0, std::abs(g.xi_minus)))
            throw std::runtime_error("xi_infinite: representation cross-check failed (-)");
    }
    return g;
}

// ---------------------------------------------------------------------------
// Path-space sensitivity bounds
// ---------------------------------------------------------------------------

/// Stationary finite-horizon bound:
/// sqrt((1/T) Var(T F)) sqrt(v^T (F_path + F_static / T) v).
inline double path_sens_bound_stationary(double var_rate, const FisherMatrix& path_fim,
                                         const FisherMatrix& static_fim, double T,
                                         std::span<const double> v) {
    if (var_rate < 0.0)
        throw std::invalid_argument("path_sens_bound_stationary: negative variance");
    if (!(T > 0.0)) throw std::invalid_argument("path_sens_bound_stationary: T must be > 0");
    const double quad =
        std::max(0.0, path_fim.quad(v) + static_fim.quad(v) / T);
    return std::sqrt(var_rate) * std::sqrt(quad);
}

/// Transient variant: the matrix term is v^T F(P_[0,T]) v / T.
inline double path_sens_bound_transient(double var_rate, const FisherMatrix& horizon_fim,
                                        double T, std::span<const double> v) {
    if (var_rate < 0.0)
        throw std::invalid_argument("path_sens_bound_transient: negative variance");
    if (!(T > 0.0)) throw std::invalid_argument("path_sens_bound_transient: T must be > 0");
    return std::sqrt(var_rate) * std::sqrt(std::max(0.0, horizon_fim.quad(v) / T));
}

/// Infinite-horizon bound sqrt(tau(f)) sqrt(v^T F_path v).
inline double path_sens_bound_infinite(double tau_f, const FisherMatrix& path_fim,
                                       std::span<const double> v) {
    if (tau_f < 0.0) throw std::invalid_argument("path_sens_bound_infinite: negative IAT");
    return std::sqrt(tau_f) * std::sqrt(std::max(0.0, path_fim.quad(v)));
}

/// Uniform-in-time bound C sqrt(v^T F_path v), with C a monitored uniform
/// bound on sqrt(T Var(F)).
inline double path_sens_bound_uniform(double C, const FisherMatrix& path_fim,
                                      std::span<const double> v) {
    if (C < 0.0) throw std::invalid_argument("path_sens_bound_uniform: negative constant");
    return C * std::sqrt(std::max(0.0, path_fim.quad(v)));
}

/// Cramer-Rao lower bound on the IAT of an estimator with bias derivative
/// psi_prime: tau(f) >= psi_prime^2 / F_path.
inline double cramer_rao_path(double psi_prime, double fisher_scalar) {
    if (!(fisher_scalar > 0.0))
        throw std::invalid_argument("cramer_rao_path: zero Fisher information");
    return psi_prime * psi_prime / fisher_scalar;
}

} // namespace uqsa
