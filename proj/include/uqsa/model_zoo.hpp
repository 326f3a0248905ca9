#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqsa/fisher.hpp"
#include "uqsa/markov.hpp"
#include "uqsa/math.hpp"
#include "uqsa/quadrature.hpp"
#include "uqsa/rng.hpp"
#include "uqsa/static_sensitivity.hpp"

namespace uqsa {

struct SensitivityRow {
    std::string observable;
    std::string parameter;
    double index = 0.0;        // analytic sensitivity index
    double bound_static = 0.0; // sqrt(Var) sqrt(v^T F_static v)
    double bound_path = 0.0;   // sqrt(tau) sqrt(v^T F_path v); +inf when singular
};

// ---------------------------------------------------------------------------
// Birth/death chain: birth at rate k1, per-capita death at rate k2.
// Stationary law is Poisson(k1/k2); every reference quantity is closed form.
// ---------------------------------------------------------------------------
struct BirthDeath {
    double k1 = 2.0;
    double k2 = 1.0;

    BirthDeath() = default;
    BirthDeath(double birth, double death) : k1(birth), k2(death) {
        if (!(k1 > 0.0) || !(k2 > 0.0))
            throw std::invalid_argument("BirthDeath: rates must be positive");
    }

    double stationary_mean() const { return k1 / k2; }
    double default_burn_in() const { return 10.0 / k2; }

    SquareMatrix stationary_fim() const {
        SquareMatrix f(2);
        f(0, 0) = 1.0 / (k1 * k2);
        f(0, 1) = f(1, 0) = -1.0 / (k2 * k2);
        f(1, 1) = k1 / (k2 * k2 * k2);
        return f;
    }

    SquareMatrix path_fim() const {
        SquareMatrix f(2);
        f(0, 0) = 1.0 / k1;
        f(1, 1) = k1 / (k2 * k2);
        return f;
    }

    // observables f1 = x and f2 = (x - k1/k2)^2
    double var_f1() const { return k1 / k2; }
    double var_f2() const { return k1 / k2 + 2.0 * (k1 / k2) * (k1 / k2); }
    double acf_f1(double t) const { return (k1 / k2) * std::exp(-k2 * std::abs(t)); }
    double acf_f2(double t) const {
        const double m = k1 / k2;
        return m * std::exp(-k2 * std::abs(t)) + 2.0 * m * m * std::exp(-2.0 * k2 * std::abs(t));
    }
    double iat_f1() const { return 2.0 * k1 / (k2 * k2); }
    double iat_f2() const { return 2.0 * (k1 / (k2 * k2) + k1 * k1 / (k2 * k2 * k2)); }

    std::vector<SensitivityRow> sensitivity_table() const {
        const double m = k1 / k2;
        const double sqrt2 = std::sqrt(2.0);
        std::vector<SensitivityRow> rows;
        rows.push_back({"f1", "k1", 1.0 / k2, 1.0 / k2, sqrt2 / k2});
        rows.push_back({"f1", "k2", -m / k2, m / k2, sqrt2 * m / k2});
        rows.push_back({"f2", "k1", 1.0 / k2, std::sqrt(1.0 + 2.0 * m) / k2,
                        sqrt2 * std::sqrt(1.0 + m) / k2});
        rows.push_back({"f2", "k2", -m / k2, m * std::sqrt(1.0 + 2.0 * m) / k2,
                        sqrt2 * m * std::sqrt(1.0 + m) / k2});
        return rows;
    }

    /// Truncation used for exact summations; the Poisson tail above it is
    /// far below double precision for desk-scale rates.
    int default_truncation() const {
        const double m = k1 / k2;
        return static_cast<int>(std::ceil(m + 12.0 * std::sqrt(m) + 30.0));
    }

    /// Truncated rate matrix with parameter scores. The birth rate is
    /// zeroed at the boundary state, and its score with it.
    CtmcSpec ctmc_spec(int n_states = 0) const {
        const int n = n_states > 0 ? n_states : default_truncation();
        CtmcSpec spec;
        spec.n_states = n;
        spec.rates.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int x = 0; x < n; ++x) {
            if (x + 1 < n) spec.rates[static_cast<std::size_t>(x) * n + x + 1] = k1;
            if (x > 0) spec.rates[static_cast<std::size_t>(x) * n + x - 1] = k2 * x;
        }
        spec.dim_theta = 2;
        const double inv_k1 = 1.0 / k1, inv_k2 = 1.0 / k2;
        spec.grad_log_rate = [n, inv_k1, inv_k2](int x, int y) -> std::vector<double> {
            if (y == x + 1 && y < n) return {inv_k1, 0.0};
            if (y == x - 1) return {0.0, inv_k2};
            return {0.0, 0.0};
        };
        spec.stationary = truncated_poisson(n);
        spec.initial_state = static_cast<int>(std::llround(k1 / k2));
        return spec;
    }

    std::vector<double> truncated_poisson(int n) const {
        const double m = k1 / k2;
        std::vector<double> mu(static_cast<std::size_t>(n));
        double logp = -m;
        double total = 0.0;
        for (int x = 0; x < n; ++x) {
            mu[static_cast<std::size_t>(x)] = std::exp(logp);
            total += mu[static_cast<std::size_t>(x)];
            logp += std::log(m) - std::log(static_cast<double>(x + 1));
        }
        for (auto& v : mu) v /= total;
        return mu;
    }

    /// Stationary Poisson family in theta = (k1, k2).
    ParametricFamily stationary_family() const {
        ParametricFamily fam;
        fam.dim_theta = 2;
        fam.log_density = [](std::span<const double> th, double x) {
            const double m = th[0] / th[1];
            return x * std::log(m) - m - std::lgamma(x + 1.0);
        };
        fam.grad_log_density = [](std::span<const double> th, double x) -> std::vector<double> {
            return {x / th[0] - 1.0 / th[1], -x / th[1] + th[0] / (th[1] * th[1])};
        };
        fam.sampler = [](std::span<const double> th, std::uint64_t seed, int n) {
            RngStream rng(seed);
            std::vector<double> out(static_cast<std::size_t>(n));
            for (auto& v : out) v = rng.poisson(th[0] / th[1]);
            return out;
        };
        fam.exact_fisher = [](std::span<const double> th) {
            return BirthDeath(th[0], th[1]).stationary_fim();
        };
        fam.exact_relative_entropy = [](std::span<const double> q, std::span<const double> p) {
            const double mq = q[0] / q[1], mp = p[0] / p[1];
            return mq * std::log(mq / mp) - mq + mp;
        };
        return fam;
    }
};

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck process dX = -alpha (X - beta) dt + gamma dB.
// Stationary law N(beta, gamma^2 / (2 alpha)).
// ---------------------------------------------------------------------------
struct OUModel {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;

    OUModel() = default;
    OUModel(double a, double b, double g) : alpha(a), beta(b), gamma(g) {
        if (!(alpha > 0.0) || !(gamma > 0.0))
            throw std::invalid_argument("OUModel: alpha and gamma must be positive");
    }

    double stationary_mean() const { return beta; }
    double stationary_var() const { return gamma * gamma / (2.0 * alpha); }
    double default_burn_in() const { return 10.0 / alpha; }

    /// Stationary FIM in (alpha, beta, gamma); the alpha-gamma block couples.
    SquareMatrix stationary_fim() const {
        SquareMatrix f(3);
        f(0, 0) = 1.0 / (2.0 * alpha * alpha);
        f(1, 1) = 2.0 * alpha / (gamma * gamma);
        f(2, 2) = 2.0 / (gamma * gamma);
        f(0, 2) = f(2, 0) = -1.0 / (alpha * gamma);
        return f;
    }

    std::vector<double> stationary_fim_diag() const {
        return {1.0 / (2.0 * alpha * alpha), 2.0 * alpha / (gamma * gamma),
                2.0 / (gamma * gamma)};
    }

    /// Girsanov path FIM; the diffusion entry is singular (+inf).
    std::vector<double> path_fim_cont_diag() const {
        return {1.0 / (2.0 * alpha), alpha * alpha / (gamma * gamma), kInf};
    }

    std::vector<double> path_fim_euler_diag(double dt) const {
        return {1.0 / (2.0 * alpha), alpha * alpha / (gamma * gamma),
                2.0 / (gamma * gamma * dt)};
    }

    /// Finite 2x2 drift block of the continuous-time path FIM, in (alpha, beta).
    SquareMatrix path_fim_drift_block() const {
        SquareMatrix f(2);
        f(0, 0) = 1.0 / (2.0 * alpha);
        f(1, 1) = alpha * alpha / (gamma * gamma);
        return f;
    }

    double acf_cont(double t) const { return stationary_var() * std::exp(-alpha * std::abs(t)); }
    double acf_euler(long n, double dt) const {
        return stationary_var() * std::pow(1.0 - alpha * dt, static_cast<double>(std::labs(n)));
    }
    double iat_x() const { return gamma * gamma / (alpha * alpha); }

    std::vector<SensitivityRow> sensitivity_table(double dt) const {
        const double sqrt2 = std::sqrt(2.0);
        const double sa = gamma / (2.0 * alpha * std::sqrt(alpha));
        std::vector<SensitivityRow> rows;
        rows.push_back({"x", "alpha", 0.0, sa, sqrt2 * sa});
        rows.push_back({"x", "beta", 1.0, 1.0, 1.0});
        rows.push_back({"x", "gamma", 0.0, 1.0 / std::sqrt(alpha), kInf});
        // Euler-regularized gamma bound is finite
        rows.push_back({"x", "gamma_euler", 0.0, 1.0 / std::sqrt(alpha),
                        sqrt2 / (alpha * std::sqrt(dt))});
        return rows;
    }

    SdeSpec sde_spec() const {
        SdeSpec spec;
        spec.dim = 1;
        spec.dim_theta = 2; // drift parameters (alpha, beta); gamma is not a drift parameter
        const double a = alpha, b = beta, g = gamma;
        spec.drift = [a, b](std::span<const double> x, std::span<double> out) {
            out[0] = -a * (x[0] - b);
        };
        spec.diffusion = [g](std::span<const double>, std::span<double> out) { out[0] = g; };
        spec.grad_drift = [a, b](std::span<const double> x, std::span<double> out) {
            out[0] = -(x[0] - b); // d drift / d alpha
            out[1] = a;           // d drift / d beta
        };
        const double sd = std::sqrt(stationary_var());
        spec.sample_stationary = [b, sd](RngStream& rng) {
            return std::vector<double>{b + sd * rng.normal()};
        };
        spec.x0 = {beta};
        return spec;
    }

    /// One-step Euler kernel N(x - alpha (x - beta) dt, gamma^2 dt) as a
    /// general Markov kernel in theta = (alpha, beta, gamma).
    DtmcSpec euler_chain(double dt) const {
        if (!(dt > 0.0)) throw std::invalid_argument("euler_chain: dt must be > 0");
        DtmcSpec spec;
        spec.dim_theta = 3;
        const double a = alpha, b = beta, g = gamma;
        const double sd = std::sqrt(stationary_var());
        spec.sample_stationary = [b, sd](RngStream& rng) { return b + sd * rng.normal(); };
        spec.sample_next = [a, b, g, dt](RngStream& rng, double x) {
            return x - a * (x - b) * dt + g * std::sqrt(dt) * rng.normal();
        };
        spec.grad_log_kernel = [a, b, g, dt](double x, double y) -> std::vector<double> {
            const double r = y - (x - a * (x - b) * dt);
            const double g2 = g * g;
            return {-r * (x - b) / g2, r * a / g2, r * r / (g2 * g * dt) - 1.0 / g};
        };
        spec.log_kernel = [a, b, g, dt](double x, double y) {
            const double r = y - (x - a * (x - b) * dt);
            return -r * r / (2.0 * g * g * dt) -
                   0.5 * std::log(2.0 * 3.14159265358979323846 * g * g * dt);
        };
        return spec;
    }

    /// Exact continuous-time RER of this model (as Q) against p, both
    /// started from this model's stationary law. +inf when the diffusions
    /// differ (mutually singular path measures).
    double rer_continuous_vs(const OUModel& p) const {
        if (gamma != p.gamma) return kInf;
        // drift difference is linear: (a_q - a_p)(x) = A x + B
        const double A = p.alpha - alpha;
        const double B = alpha * beta - p.alpha * p.beta;
        const double m = stationary_mean(), v = stationary_var();
        const double e2 = A * A * (v + m * m) + 2.0 * A * B * m + B * B;
        return 0.5 * e2 / (gamma * gamma);
    }

    /// Exact per-unit-time RER between the Euler chains of this model (Q)
    /// and p, averaged over this model's stationary law.
    double rer_euler_vs(const OUModel& p, double dt) const {
        const double sq2 = gamma * gamma * dt;
        const double sp2 = p.gamma * p.gamma * dt;
        // mean difference m_q(x) - m_p(x) = dt (A x + B)
        const double A = p.alpha - alpha;
        const double B = alpha * beta - p.alpha * p.beta;
        const double m = stationary_mean(), v = stationary_var();
        const double e2 = dt * dt * (A * A * (v + m * m) + 2.0 * A * B * m + B * B);
        const double kl = 0.5 * std::log(sp2 / sq2) + (sq2 + e2) / (2.0 * sp2) - 0.5;
        return kl / dt;
    }

    /// Stationary Gaussian family in theta = (alpha, beta, gamma).
    ParametricFamily stationary_family() const {
        ParametricFamily fam;
        fam.dim_theta = 3;
        fam.log_density = [](std::span<const double> th, double x) {
            const double s2 = th[2] * th[2] / (2.0 * th[0]);
            const double r = x - th[1];
            return -r * r / (2.0 * s2) - 0.5 * std::log(2.0 * 3.14159265358979323846 * s2);
        };
        fam.grad_log_density = [](std::span<const double> th, double x) -> std::vector<double> {
            const double s2 = th[2] * th[2] / (2.0 * th[0]);
            const double r = x - th[1];
            const double z2m1 = r * r / s2 - 1.0;
            return {-z2m1 / (2.0 * th[0]), r / s2, z2m1 / th[2]};
        };
        fam.sampler = [](std::span<const double> th, std::uint64_t seed, int n) {
            RngStream rng(seed);
            const double sd = th[2] / std::sqrt(2.0 * th[0]);
            std::vector<double> out(static_cast<std::size_t>(n));
            for (auto& v : out) v = th[1] + sd * rng.normal();
            return out;
        };
        fam.exact_fisher = [](std::span<const double> th) {
            return OUModel(th[0], th[1], th[2]).stationary_fim();
        };
        fam.exact_relative_entropy = [](std::span<const double> q, std::span<const double> p) {
            const double vq = q[2] * q[2] / (2.0 * q[0]);
            const double vp = p[2] * p[2] / (2.0 * p[0]);
            const double dm = q[1] - p[1];
            return 0.5 * (std::log(vp / vq) + (vq + dm * dm) / vp - 1.0);
        };
        return fam;
    }
};

// ---------------------------------------------------------------------------
// Scalar exponential decay u' = -X u with Gaussian rate X ~ N(mu, sigma^2):
// u(t) = u0 exp(-X t) is log-normal with parameters (log u0 - mu t, (sigma t)^2).
// Observable of interest: the exceedance indicator chi_{u > threshold}.
// ---------------------------------------------------------------------------
struct LogNormalDecay {
    double u0 = 1.0;
    double mu = 1.0;
    double sigma = 1.0;
    double threshold = 10.0;
    double t = 1.0;

    LogNormalDecay() = default;
    LogNormalDecay(double u0_, double mu_, double sigma_, double threshold_, double t_)
        : u0(u0_), mu(mu_), sigma(sigma_), threshold(threshold_), t(t_) {
        if (!(u0 > 0.0) || !(sigma > 0.0) || !(threshold > 0.0) || !(t > 0.0))
            throw std::invalid_argument("LogNormalDecay: invalid parameters");
    }

    double log_mean() const { return std::log(u0) - mu * t; }
    double log_sd() const { return sigma * t; }

    /// P(u(t) > threshold) through the normal CDF of log u.
    double failure_probability() const {
        const double z = (std::log(threshold) - log_mean()) / log_sd();
        return 1.0 - normal_cdf(z);
    }

    /// Var of the exceedance indicator, 1/4 - (1/4) erf^2(z / sqrt(2)).
    double indicator_variance() const {
        const double z = (std::log(threshold) - log_mean()) / log_sd();
        const double e = std::erf(z * 0.7071067811865475244);
        return 0.25 - 0.25 * e * e;
    }

    struct Sensitivities {
        double s_mu = 0.0;
        double s_sigma = 0.0;
        double fim_mu = 0.0;    // F_11
        double fim_sigma = 0.0; // F_22
        double var_f = 0.0;
        double bound_mu = 0.0;
        double bound_sigma = 0.0;
    };

    /// Sensitivity indices of the failure probability in (mu, sigma) and the
    /// corresponding information bounds, by adaptive quadrature after the
    /// log(u) substitution (relative tolerance 1e-8).
    Sensitivities sensitivities() const {
        const double m = log_mean();
        const double s = log_sd();
        const double b = std::log(threshold);
        const double lo_all = m - 12.0 * s, hi = m + 12.0 * s;
        const double lo_ind = std::max(b, lo_all);
        auto dens = [m, s](double y) {
            const double z = (y - m) / s;
            return normal_pdf(z) / s;
        };
        const double s2t = sigma * sigma * t;       // sigma^2 t
        const double s3t2 = sigma * sigma * sigma * t * t;
        Sensitivities out;
        if (lo_ind < hi) {
            out.s_mu = -integrate([&](double y) { return (y - m) / s2t * dens(y); }, lo_ind,
                                  hi, 1e-8, 1e-14);
            out.s_sigma = integrate(
                [&](double y) {
                    const double q = (y - m) * (y - m) - s * s;
                    return q / s3t2 * dens(y);
                },
                lo_ind, hi, 1e-8, 1e-14);
        }
        out.fim_mu = integrate([&](double y) { return (y - m) * (y - m) / (s2t * s2t) * dens(y); },
                               lo_all, hi, 1e-8, 1e-14);
        out.fim_sigma = integrate(
            [&](double y) {
                const double q = (y - m) * (y - m) - s * s;
                return q * q / (s3t2 * s3t2) * dens(y);
            },
            lo_all, hi, 1e-8, 1e-14);
        out.var_f = indicator_variance();
        out.bound_mu = std::sqrt(out.var_f) * std::sqrt(out.fim_mu);
        out.bound_sigma = std::sqrt(out.var_f) * std::sqrt(out.fim_sigma);
        return out;
    }
};

/// Every closed-form birth/death reference quantity in one record.
struct BdReference {
    double k1 = 0.0, k2 = 0.0;
    SquareMatrix stationary_fim;
    SquareMatrix path_fim;
    double mean = 0.0;
    double var_f1 = 0.0, var_f2 = 0.0;
    double iat_f1 = 0.0, iat_f2 = 0.0;
    std::vector<SensitivityRow> sensitivities;
};

inline BdReference bd_reference(double k1, double k2) {
    const BirthDeath bd(k1, k2);
    BdReference r;
    r.k1 = k1;
    r.k2 = k2;
    r.stationary_fim = bd.stationary_fim();
    r.path_fim = bd.path_fim();
    r.mean = bd.stationary_mean();
    r.var_f1 = bd.var_f1();
    r.var_f2 = bd.var_f2();
    r.iat_f1 = bd.iat_f1();
    r.iat_f2 = bd.iat_f2();
    r.sensitivities = bd.sensitivity_table();
    return r;
}

/// Ornstein-Uhlenbeck reference record; the continuous-time diffusion entry
/// carries the infinity sentinel.
struct OuReference {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, dt = 0.0;
    SquareMatrix stationary_fim;
    std::vector<double> stationary_fim_diag;
    std::vector<double> path_fim_cont_diag;
    std::vector<double> path_fim_euler_diag;
    double var_x = 0.0;
    double iat_x = 0.0;
    std::vector<SensitivityRow> sensitivities;
};

inline OuReference ou_reference(double alpha, double beta, double gamma, double dt) {
    const OUModel ou(alpha, beta, gamma);
    OuReference r;
    r.alpha = alpha;
    r.beta = beta;
    r.gamma = gamma;
    r.dt = dt;
    r.stationary_fim = ou.stationary_fim();
    r.stationary_fim_diag = ou.stationary_fim_diag();
    r.path_fim_cont_diag = ou.path_fim_cont_diag();
    r.path_fim_euler_diag = ou.path_fim_euler_diag(dt);
    r.var_x = ou.stationary_var();
    r.iat_x = ou.iat_x();
    r.sensitivities = ou.sensitivity_table(dt);
    return r;
}

// ---------------------------------------------------------------------------
// Exponential families P(x) = exp(t(x) . theta - F(theta) + k(x)).
// ---------------------------------------------------------------------------
struct ExpFamily {
    std::string name;
    int dim_theta = 0;
    std::function<double(std::span<const double>)> log_normalizer;
    std::function<std::vector<double>(std::span<const double>)> grad_log_normalizer;
    std::function<SquareMatrix(std::span<const double>)> hess_log_normalizer;

    /// Natural-parameter Gaussian: t(x) = (x, x^2), theta2 < 0.
    static ExpFamily gaussian_natural() {
        ExpFamily f;
        f.name = "gaussian";
        f.dim_theta = 2;
        f.log_normalizer = [](std::span<const double> th) {
            if (!(th[1] < 0.0)) throw std::invalid_argument("gaussian_natural: theta2 must be < 0");
            return -th[0] * th[0] / (4.0 * th[1]) +
                   0.5 * std::log(3.14159265358979323846 / -th[1]);
        };
        f.grad_log_normalizer = [](std::span<const double> th) -> std::vector<double> {
            return {-th[0] / (2.0 * th[1]),
                    th[0] * th[0] / (4.0 * th[1] * th[1]) - 1.0 / (2.0 * th[1])};
        };
        f.hess_log_normalizer = [](std::span<const double> th) {
            SquareMatrix h(2);
            h(0, 0) = -1.0 / (2.0 * th[1]);
            h(0, 1) = h(1, 0) = th[0] / (2.0 * th[1] * th[1]);
            h(1, 1) = -th[0] * th[0] / (2.0 * th[1] * th[1] * th[1]) +
                      1.0 / (2.0 * th[1] * th[1]);
            return h;
        };
        return f;
    }

    /// Natural-parameter Poisson: t(x) = x, F(theta) = e^theta.
    static ExpFamily poisson_natural() {
        ExpFamily f;
        f.name = "poisson";
        f.dim_theta = 1;
        f.log_normalizer = [](std::span<const double> th) { return std::exp(th[0]); };
        f.grad_log_normalizer = [](std::span<const double> th) -> std::vector<double> {
            return {std::exp(th[0])};
        };
        f.hess_log_normalizer = [](std::span<const double> th) {
            SquareMatrix h(1);
            h(0, 0) = std::exp(th[0]);
            return h;
        };
        return f;
    }

    /// Natural-parameter Bernoulli: t(x) = x, F(theta) = log(1 + e^theta).
    static ExpFamily bernoulli_natural() {
        ExpFamily f;
        f.name = "bernoulli";
        f.dim_theta = 1;
        f.log_normalizer = [](std::span<const double> th) { return std::log1p(std::exp(th[0])); };
        f.grad_log_normalizer = [](std::span<const double> th) -> std::vector<double> {
            return {1.0 / (1.0 + std::exp(-th[0]))};
        };
        f.hess_log_normalizer = [](std::span<const double> th) {
            const double p = 1.0 / (1.0 + std::exp(-th[0]));
            SquareMatrix h(1);
            h(0, 0) = p * (1.0 - p);
            return h;
        };
        return f;
    }
};

struct ExpfamReference {
    SquareMatrix sensitivity; // S_{t_k, theta_l} = Hessian of F
    SquareMatrix covariance;  // Cov(t) = Hessian of F
    SquareMatrix fim;         // FIM = Hessian of F
};

inline ExpfamReference expfam_reference(const ExpFamily& fam, std::span<const double> theta) {
    if (!fam.hess_log_normalizer) throw std::invalid_argument("expfam_reference: Hessian unavailable");
    ExpfamReference r;
    r.sensitivity = fam.hess_log_normalizer(theta);
    r.covariance = r.sensitivity;
    r.fim = r.sensitivity;
    return r;
}

/// Bregman form of R(P^theta || P^{theta+eps}):
/// F(theta+eps) - F(theta) - eps . grad F(theta).
inline double bregman_relative_entropy(const ExpFamily& fam, std::span<const double> theta,
                                       std::span<const double> eps) {
    std::vector<double> shifted(theta.begin(), theta.end());
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += eps[i];
    const double df = fam.log_normalizer(shifted) - fam.log_normalizer(theta);
    const auto g = fam.grad_log_normalizer(theta);
    double lin = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) lin += eps[i] * g[i];
    return df - lin;
}

// ---------------------------------------------------------------------------
// Simple parametric test families
// ---------------------------------------------------------------------------

inline ParametricFamily gaussian_location_family(double sigma = 1.0) {
    ParametricFamily fam;
    fam.dim_theta = 1;
    const double s2 = sigma * sigma;
    fam.log_density = [s2](std::span<const double> th, double x) {
        const double r = x - th[0];
        return -r * r / (2.0 * s2) - 0.5 * std::log(2.0 * 3.14159265358979323846 * s2);
    };
    fam.grad_log_density = [s2](std::span<const double> th, double x) -> std::vector<double> {
        return {(x - th[0]) / s2};
    };
    fam.sampler = [sigma](std::span<const double> th, std::uint64_t seed, int n) {
        RngStream rng(seed);
        std::vector<double> out(static_cast<std::size_t>(n));
        for (auto& v : out) v = th[0] + sigma * rng.normal();
        return out;
    };
    fam.exact_fisher = [s2](std::span<const double>) {
        SquareMatrix f(1);
        f(0, 0) = 1.0 / s2;
        return f;
    };
    fam.exact_relative_entropy = [s2](std::span<const double> q, std::span<const double> p) {
        const double d = q[0] - p[0];
        return d * d / (2.0 * s2);
    };
    return fam;
}

inline ParametricFamily poisson_family() {
    ParametricFamily fam;
    fam.dim_theta = 1;
    fam.log_density = [](std::span<const double> th, double x) {
        return x * std::log(th[0]) - th[0] - std::lgamma(x + 1.0);
    };
    fam.grad_log_density = [](std::span<const double> th, double x) -> std::vector<double> {
        return {x / th[0] - 1.0};
    };
    fam.sampler = [](std::span<const double> th, std::uint64_t seed, int n) {
        RngStream rng(seed);
        std::vector<double> out(static_cast<std::size_t>(n));
        for (auto& v : out) v = rng.poisson(th[0]);
        return out;
    };
    fam.exact_fisher = [](std::span<const double> th) {
        SquareMatrix f(1);
        f(0, 0) = 1.0 / th[0];
        return f;
    };
    fam.exact_relative_entropy = [](std::span<const double> q, std::span<const double> p) {
        return q[0] * std::log(q[0] / p[0]) - q[0] + p[0];
    };
    return fam;
}

inline ParametricFamily bernoulli_family() {
    ParametricFamily fam;
    fam.dim_theta = 1;
    fam.log_density = [](std::span<const double> th, double x) {
        return x > 0.5 ? std::log(th[0]) : std::log1p(-th[0]);
    };
    fam.grad_log_density = [](std::span<const double> th, double x) -> std::vector<double> {
        return {x > 0.5 ? 1.0 / th[0] : -1.0 / (1.0 - th[0])};
    };
    fam.sampler = [](std::span<const double> th, std::uint64_t seed, int n) {
        RngStream rng(seed);
        std::vector<double> out(static_cast<std::size_t>(n));
        for (auto& v : out) v = rng.uniform() <= th[0] ? 1.0 : 0.0;
        return out;
    };
    fam.exact_fisher = [](std::span<const double> th) {
        SquareMatrix f(1);
        f(0, 0) = 1.0 / (th[0] * (1.0 - th[0]));
        return f;
    };
    fam.exact_relative_entropy = [](std::span<const double> q, std::span<const double> p) {
        const double a = q[0], b = p[0];
        double s = 0.0;
        if (a > 0.0) s += a * std::log(a / b);
        if (a < 1.0) s += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
        return s;
    };
    return fam;
}

} // namespace uqsa
