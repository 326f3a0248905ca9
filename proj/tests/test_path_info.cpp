#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "uqsa/model_zoo.hpp"
#include "uqsa/path_info.hpp"

using namespace uqsa;

namespace {

FiniteDtmc two_state(double p01, double p10, std::vector<double> init = {1.0, 0.0}) {
    FiniteDtmc c;
    c.n_states = 2;
    c.kernel = {1.0 - p01, p01, p10, 1.0 - p10};
    c.initial = std::move(init);
    return c;
}

// exhaustive path-space oracle: probabilities of all state sequences of
// length T+1, plus the path relative entropy and observable moments
struct PathSpace {
    std::vector<double> probs_p, probs_q, sum_f; // sum over steps 0..T-1
};

PathSpace enumerate_paths(const FiniteDtmc& p_chain, std::span<const double> mu,
                          const FiniteDtmc& q_chain, std::span<const double> nu,
                          std::span<const double> f, int T) {
    const int n = p_chain.n_states;
    long total = 1;
    for (int i = 0; i <= T; ++i) total *= n;
    PathSpace out;
    out.probs_p.resize(static_cast<std::size_t>(total));
    out.probs_q.resize(static_cast<std::size_t>(total));
    out.sum_f.resize(static_cast<std::size_t>(total));
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<int> states(static_cast<std::size_t>(T) + 1);
        for (int i = 0; i <= T; ++i) {
            states[static_cast<std::size_t>(i)] = static_cast<int>(c % n);
            c /= n;
        }
        double pp = mu[static_cast<std::size_t>(states[0])];
        double qq = nu[static_cast<std::size_t>(states[0])];
        double sf = 0.0;
        for (int i = 0; i < T; ++i) {
            pp *= p_chain.p(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(i) + 1]);
            qq *= q_chain.p(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(i) + 1]);
            sf += f[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])];
        }
        out.probs_p[static_cast<std::size_t>(code)] = pp;
        out.probs_q[static_cast<std::size_t>(code)] = qq;
        out.sum_f[static_cast<std::size_t>(code)] = sf;
    }
    return out;
}

double path_relative_entropy(const PathSpace& ps) {
    double s = 0.0;
    for (std::size_t i = 0; i < ps.probs_p.size(); ++i) {
        if (ps.probs_q[i] == 0.0) continue;
        s += ps.probs_q[i] * std::log(ps.probs_q[i] / ps.probs_p[i]);
    }
    return s;
}

double discrete_re(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0.0) s += a[i] * std::log(a[i] / b[i]);
    return s;
}

CtmcSpec random_ctmc(RngStream& rng, int n, int dim_theta = 0) {
    CtmcSpec spec;
    spec.n_states = n;
    spec.rates.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y) spec.rates[static_cast<std::size_t>(x) * n + y] = 0.2 + 2.0 * rng.uniform();
    spec.dim_theta = dim_theta;
    return spec;
}

} // namespace

TEST_CASE("rer_dtmc exact values") {
    const auto q = two_state(0.1, 0.2);
    const auto p = two_state(0.2, 0.3);
    const std::vector<double> nu = {2.0 / 3.0, 1.0 / 3.0};
    REQUIRE(rer_dtmc(q, q, nu) == 0.0);
    // hand-computed nu-weighted rowwise KL for these kernels
    REQUIRE_THAT(rer_dtmc(q, p, nu), Catch::Matchers::WithinAbs(0.03303737351582884, 1e-14));
    auto p_deg = two_state(0.0, 0.3);
    REQUIRE(std::isinf(rer_dtmc(q, p_deg, nu)));
}

TEST_CASE("path relative entropy decomposes as T * RER + initial term") {
    const auto q = two_state(0.1, 0.2, {0.5, 0.5});
    const auto p = two_state(0.25, 0.15, {0.9, 0.1});
    const auto nu = dtmc_stationary(q);
    const std::vector<double> f = {0.0, 1.0};
    auto q_stat = q;
    q_stat.initial = nu;
    const double rer = rer_dtmc(q, p, nu);
    const double init_re = discrete_re(nu, p.initial);
    for (int T = 1; T <= 3; ++T) {
        const auto ps = enumerate_paths(p, p.initial, q_stat, nu, f, T);
        REQUIRE_THAT(path_relative_entropy(ps),
                     Catch::Matchers::WithinAbs(T * rer + init_re, 1e-10));
    }
}

TEST_CASE("path bounds sandwich exhaustive two-state path expectations") {
    const auto p = two_state(0.3, 0.4, {0.6, 0.4});
    const std::vector<double> f = {0.0, 1.0};
    const int T = 3;
    for (double d1 = -0.2; d1 <= 0.2 + 1e-12; d1 += 0.1) {
        for (double d2 = -0.2; d2 <= 0.2 + 1e-12; d2 += 0.1) {
            const auto q = two_state(0.3 + d1, 0.4 + d2, {0.6, 0.4});
            const auto ps = enumerate_paths(p, p.initial, q, q.initial, f, T);
            const double relent = path_relative_entropy(ps);
            // exact CGF of T * F-bar under the nominal path measure
            const auto h = CgfHandle::weighted(ps.sum_f, ps.probs_p);
            const auto g = path_xi_bounds(h, relent, T);
            double gap = 0.0;
            for (std::size_t i = 0; i < ps.sum_f.size(); ++i)
                gap += (ps.probs_q[i] - ps.probs_p[i]) * ps.sum_f[i] / T;
            REQUIRE(gap <= g.xi_plus + 1e-8);
            REQUIRE(gap >= g.xi_minus - 1e-8);
        }
    }
    // zero budget collapses the bounds
    const auto ps = enumerate_paths(p, p.initial, p, p.initial, f, T);
    const auto g0 = path_xi_bounds(CgfHandle::weighted(ps.sum_f, ps.probs_p), 0.0, T);
    REQUIRE(g0.xi_plus == 0.0);
    REQUIRE(g0.xi_minus == 0.0);
}

TEST_CASE("path bounds linearize to sqrt(tau_T) sqrt(2 rho2)") {
    const auto p = two_state(0.3, 0.4, {0.6, 0.4});
    const std::vector<double> f = {0.0, 1.0};
    const int T = 4;
    const auto ps = enumerate_paths(p, p.initial, p, p.initial, f, T);
    const auto h = CgfHandle::weighted(ps.sum_f, ps.probs_p);
    const double tau_T = h.variance() / T; // (1/T) Var(T F-bar)
    for (const double relent : {1e-6, 1e-8}) {
        const auto g = path_xi_bounds(h, relent, T);
        const double lin = std::sqrt(tau_T) * std::sqrt(2.0 * relent / T);
        REQUIRE_THAT(g.xi_plus / lin, Catch::Matchers::WithinAbs(1.0, 1e-2));
    }
}

TEST_CASE("parametrized two-state chain: path FIM is the RER Hessian") {
    auto chain_at = [](double a, double b) {
        auto c = two_state(a, b);
        c.dim_theta = 2;
        c.grad_log_kernel = [a, b](int x, int y) -> std::vector<double> {
            if (x == 0) return {y == 1 ? 1.0 / a : -1.0 / (1.0 - a), 0.0};
            return {0.0, y == 0 ? 1.0 / b : -1.0 / (1.0 - b)};
        };
        return c;
    };
    const double a = 0.3, b = 0.45;
    const auto chain = chain_at(a, b);
    const auto mu = dtmc_stationary(chain);
    const auto fim = pfim_dtmc_exact(chain, mu);
    REQUIRE_THAT(fim.entries(0, 0), Catch::Matchers::WithinRel(mu[0] / (a * (1.0 - a)), 1e-10));
    REQUIRE_THAT(fim.entries(1, 1), Catch::Matchers::WithinRel(mu[1] / (b * (1.0 - b)), 1e-10));
    REQUIRE(fim.entries(0, 1) == 0.0);

    const std::vector<double> v = {0.6, 0.8};
    double eps = 1e-2;
    double prev = kInf;
    for (int i = 0; i < 3; ++i) {
        const auto shifted = chain_at(a + eps * v[0], b + eps * v[1]);
        const double rer = rer_dtmc(chain, shifted, mu);
        const double resid = std::abs(2.0 * rer / (eps * eps) - fim.quad(v));
        REQUIRE(resid < prev);
        prev = resid;
        eps *= 0.5;
    }
}

TEST_CASE("ctmc relative entropy rate") {
    const BirthDeath bd(2.0, 1.0);
    const auto spec = bd.ctmc_spec();
    SECTION("identical chains have zero rate") {
        REQUIRE(rer_ctmc(spec, spec, spec.stationary) == 0.0);
        REQUIRE(rer_ctmc_lform(spec, spec, spec.stationary) == 0.0);
    }
    SECTION("jump form equals the l-form and both are nonnegative") {
        RngStream rng(7);
        for (int trial = 0; trial < 30; ++trial) {
            const auto q = random_ctmc(rng, 3);
            const auto p = random_ctmc(rng, 3);
            const auto mu = ctmc_stationary(q);
            const double direct = rer_ctmc(q, p, mu);
            REQUIRE_THAT(direct, Catch::Matchers::WithinAbs(rer_ctmc_lform(q, p, mu), 1e-12));
            REQUIRE(direct >= 0.0);
        }
    }
    SECTION("birth-rate perturbation recovers the path Fisher entry") {
        const double eps = 1e-3;
        const BirthDeath q(2.0 + eps, 1.0);
        const auto q_spec = q.ctmc_spec(spec.n_states);
        const double rer = rer_ctmc(q_spec, spec, q_spec.stationary);
        REQUIRE_THAT(2.0 * rer / (eps * eps), Catch::Matchers::WithinRel(0.5, 1e-3));
    }
    SECTION("support mismatch is singular") {
        RngStream rng(9);
        auto q = random_ctmc(rng, 3);
        auto p = q;
        p.rates[1] = 0.0; // q jumps 0 -> 1 but p cannot
        const auto mu = ctmc_stationary(q);
        REQUIRE(std::isinf(rer_ctmc(q, p, mu)));
        REQUIRE(std::isinf(rer_ctmc_lform(q, p, mu)));
    }
}

TEST_CASE("ctmc path FIM") {
    const BirthDeath bd(2.0, 1.0);
    const auto spec = bd.ctmc_spec();
    SECTION("exact summation reproduces the closed form") {
        const auto f = pfim_ctmc_exact(spec, spec.stationary);
        REQUIRE_THAT(f.entries(0, 0), Catch::Matchers::WithinRel(0.5, 1e-10));
        REQUIRE_THAT(f.entries(1, 1), Catch::Matchers::WithinRel(2.0, 1e-10));
        REQUIRE(std::abs(f.entries(0, 1)) < 1e-12);
    }
    SECTION("parameter-independent rates give a zero matrix") {
        auto flat = spec;
        flat.grad_log_rate = [](int, int) -> std::vector<double> { return {0.0, 0.0}; };
        const auto f = pfim_ctmc_exact(flat, flat.stationary);
        for (double v : f.entries.a) REQUIRE(v == 0.0);
    }
    SECTION("jump-chain Monte Carlo matches within 5 percent") {
        const auto f = pfim_ctmc(spec, 100000, 3);
        REQUIRE_THAT(f.entries(0, 0), Catch::Matchers::WithinRel(0.5, 0.05));
        REQUIRE_THAT(f.entries(1, 1), Catch::Matchers::WithinRel(2.0, 0.05));
    }
    SECTION("transient score matrix converges to the stationary path FIM") {
        const auto e = ssa(spec, SimConfig{500, 50.0, 0.0, bd.default_burn_in(), 5, 2});
        const auto f = pfim_ctmc_transient(spec, e);
        REQUIRE_THAT(f.entries(0, 0) / e.horizon, Catch::Matchers::WithinRel(0.5, 0.1));
        REQUIRE_THAT(f.entries(1, 1) / e.horizon, Catch::Matchers::WithinRel(2.0, 0.1));
    }
}

TEST_CASE("girsanov RER and path FIM for diffusions") {
    const OUModel base(1.0, 0.0, 1.0);
    RngStream rng(11);
    std::vector<std::vector<double>> draws(100000);
    const auto sde = base.sde_spec();
    for (auto& x : draws) x = sde.sample_stationary(rng);

    SECTION("identical drifts give zero") {
        const auto r = rer_sde(sde, sde, draws);
        REQUIRE(r.value == 0.0);
    }
    SECTION("drift perturbation matches the closed form") {
        const double eps = 0.1;
        const OUModel shifted(1.0 + eps, 0.0, 1.0);
        const auto r = rer_sde(sde, shifted.sde_spec(), draws);
        const double exact = base.rer_continuous_vs(shifted); // eps^2 / (4 alpha)
        REQUIRE_THAT(exact, Catch::Matchers::WithinRel(eps * eps / 4.0, 1e-12));
        REQUIRE(std::abs(r.value - exact) <= 4.0 * r.stderr_);
    }
    SECTION("diffusion perturbation is singular") {
        const OUModel noisy(1.0, 0.0, 1.2);
        REQUIRE(std::isinf(rer_sde(sde, noisy.sde_spec(), draws).value));
        REQUIRE(std::isinf(base.rer_continuous_vs(noisy)));
    }
    SECTION("path FIM over stationary samples") {
        const auto f = pfim_sde(sde, draws);
        REQUIRE(std::abs(f.entries(0, 0) - 0.5) <= 4.0 * f.stderr_(0, 0));
        REQUIRE(std::abs(f.entries(1, 1) - 1.0) <= 4.0 * f.stderr_(1, 1));
        REQUIRE(std::abs(f.entries(0, 1)) <= 4.0 * f.stderr_(0, 1) + 1e-12);
    }
    SECTION("theta-independent drift gives a zero matrix") {
        auto fixed = sde;
        fixed.grad_drift = [](std::span<const double>, std::span<double> out) {
            out[0] = 0.0;
            out[1] = 0.0;
        };
        const auto f = pfim_sde(fixed, draws);
        REQUIRE(f.entries(0, 0) == 0.0);
        REQUIRE(f.entries(1, 1) == 0.0);
    }
}

TEST_CASE("xi_infinite saturates like the static policy for bounded observables") {
    const auto h = pf_limiting_cgf(two_state(0.2, 0.3), {0.0, 1.0});
    const auto g = xi_infinite(h, 10.0); // budget far beyond any finite sup Phi
    REQUIRE(g.saturated_plus);
    REQUIRE(g.saturated_minus);
    const auto pi = dtmc_stationary(two_state(0.2, 0.3));
    REQUIRE_THAT(g.xi_plus, Catch::Matchers::WithinAbs(1.0 - pi[1], 1e-9));
    REQUIRE_THAT(g.xi_minus, Catch::Matchers::WithinAbs(-pi[1], 1e-9));
}

TEST_CASE("parameter-independent kernels give a zero Monte Carlo path FIM") {
    DtmcSpec flat = OUModel(1.0, 0.0, 1.0).euler_chain(0.01);
    flat.grad_log_kernel = [](double, double) -> std::vector<double> {
        return {0.0, 0.0, 0.0};
    };
    const auto f = pfim_dtmc(flat, 1000, 5);
    for (double v : f.entries.a) REQUIRE(v == 0.0);
}

TEST_CASE("euler chain path FIM per unit time") {
    const OUModel ou(1.0, 0.0, 1.0);
    const double dt = 0.01;
    const auto f = pfim_euler(ou.euler_chain(dt), dt, 150000, 13);
    const auto expect = ou.path_fim_euler_diag(dt);
    REQUIRE_THAT(f.entries(0, 0), Catch::Matchers::WithinRel(expect[0], 0.05));
    REQUIRE_THAT(f.entries(1, 1), Catch::Matchers::WithinRel(expect[1], 0.05));
    REQUIRE_THAT(f.entries(2, 2), Catch::Matchers::WithinRel(expect[2], 0.05));
    REQUIRE(f.provenance == FisherProvenance::path_euler);
}

TEST_CASE("euler chain RER closed form and Monte Carlo estimator agree") {
    const OUModel ou(1.0, 0.0, 1.0);
    const double dt = 0.01, eps = 0.3;
    const OUModel shifted(1.0 + eps, 0.1 * eps, 1.0);
    const double exact = ou.rer_euler_vs(shifted, dt);
    const auto mc = rer_dtmc_mc(ou.euler_chain(dt), shifted.euler_chain(dt), 200000, 15);
    REQUIRE(std::abs(mc.value / dt - exact) <= 4.0 * mc.stderr_ / dt);
    // gamma perturbations stay finite after time discretization
    const OUModel noisy(1.0, 0.0, 1.0 + eps);
    REQUIRE(std::isfinite(ou.rer_euler_vs(noisy, dt)));
}

TEST_CASE("iat_finite on analytic autocovariances") {
    SECTION("white noise collapses to the variance") {
        const std::vector<double> acf = {1.7, 0.0, 0.0, 0.0};
        REQUIRE(iat_finite(acf, kInf) == 1.7);
        REQUIRE(iat_finite(acf, 3.0) == 1.7);
    }
    SECTION("birth/death and OU table values") {
        const BirthDeath bd(2.0, 1.0);
        const OUModel ou(1.0, 0.0, 1.0);
        const double dt = 2e-4;
        const auto len = static_cast<std::size_t>(45.0 / dt);
        std::vector<double> acf1(len), acf2(len), acf_ou(len);
        for (std::size_t k = 0; k < len; ++k) {
            const double t = static_cast<double>(k) * dt;
            acf1[k] = bd.acf_f1(t);
            acf2[k] = bd.acf_f2(t);
            acf_ou[k] = ou.acf_cont(t);
        }
        REQUIRE_THAT(iat_finite(acf1, kInf, dt), Catch::Matchers::WithinAbs(4.0, 1e-6));
        REQUIRE_THAT(iat_finite(acf2, kInf, dt), Catch::Matchers::WithinAbs(12.0, 1e-6));
        REQUIRE_THAT(iat_finite(acf_ou, kInf, dt), Catch::Matchers::WithinAbs(1.0, 1e-6));
        // finite window: tau_T = tau - (2/T) int t A(t) dt + o(1/T)
        REQUIRE_THAT(iat_finite(acf1, 40.0, dt), Catch::Matchers::WithinAbs(4.0 - 4.0 / 40.0, 1e-3));
    }
    REQUIRE_THROWS_AS(iat_finite(std::vector<double>{1.0, 0.5}, 10.0, 1.0),
                      std::invalid_argument);
}

TEST_CASE("iat_infinite from simulated ensembles") {
    SECTION("iid samples return the variance") {
        PathEnsemble e;
        e.kind = PathEnsemble::Kind::strided;
        e.dt = 1.0;
        e.horizon = 300.0;
        RngStream rng(17);
        e.paths.resize(80);
        for (auto& p : e.paths) {
            p.x.resize(301);
            for (auto& x : p.x) x = 2.0 * rng.normal();
        }
        const auto est = iat_infinite(acf_estimate(e, Observable::identity(), 20));
        REQUIRE(std::abs(est.value - 4.0) <= 4.0 * est.stderr_ + 0.05 * 4.0);
    }
    SECTION("birth/death second central moment") {
        const BirthDeath bd(2.0, 1.0);
        const auto e = ssa(bd.ctmc_spec(), SimConfig{600, 50.0, 0.0, bd.default_burn_in(), 19, 4});
        const auto acf = acf_estimate(e, Observable::second_central(2.0), 80, 0.1);
        const auto est = iat_infinite(acf);
        REQUIRE_THAT(est.value, Catch::Matchers::WithinRel(12.0, 0.15));
        REQUIRE_FALSE(est.nonstationary_warning);
    }
}

TEST_CASE("perron-frobenius limiting CGF") {
    SECTION("stochastic matrices have unit eigenvalue at c = 0") {
        const auto chain = two_state(0.1, 0.2);
        REQUIRE_THAT(pf_eigen_cgf(chain, std::vector<double>{0.0, 1.0}, 0.0),
                     Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
    SECTION("uniform chain reduces to the iid Bernoulli CGF") {
        const auto chain = two_state(0.5, 0.5);
        const std::vector<double> f = {0.0, 1.0};
        for (double c : {-2.0, -0.5, 0.7, 1.5}) {
            const double expect = std::log(0.5 * (1.0 + std::exp(c)));
            REQUIRE_THAT(pf_eigen_cgf(chain, f, c), Catch::Matchers::WithinAbs(expect, 1e-11));
        }
    }
    SECTION("eigen-derivative matches finite differences") {
        const auto chain = two_state(0.15, 0.3);
        const std::vector<double> f = {-0.5, 1.0};
        for (double c : {-1.0, 0.4}) {
            const double h = 1e-6;
            const double fd =
                (pf_eigen_cgf(chain, f, c + h) - pf_eigen_cgf(chain, f, c - h)) / (2.0 * h);
            REQUIRE_THAT(pf_eigen(chain, f, c).dlog_lambda_dc,
                         Catch::Matchers::WithinAbs(fd, 1e-7));
        }
    }
    SECTION("centered handle is convex with vanishing first moment") {
        const auto h = pf_limiting_cgf(two_state(0.15, 0.3), {0.0, 1.0});
        REQUIRE(std::abs(h.value(0.0)) < 1e-12);
        REQUIRE(std::abs(h.deriv(0.0)) < 1e-9);
        std::vector<double> vals;
        for (double c = -2.0; c <= 2.0; c += 0.1) vals.push_back(h.value(c));
        for (std::size_t i = 1; i + 1 < vals.size(); ++i)
            REQUIRE(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-10);
    }
    SECTION("periodic chains stall the power iteration") {
        const auto flip = two_state(1.0, 1.0);
        REQUIRE_THROWS_AS(pf_eigen_cgf(flip, std::vector<double>{0.0, 1.0}, 0.5),
                          std::runtime_error);
    }
}

TEST_CASE("xi_infinite sandwiches long-run averages of a perturbed chain") {
    const auto p = two_state(0.1, 0.2);
    const auto h = pf_limiting_cgf(p, {0.0, 1.0});
    REQUIRE(xi_infinite(h, 0.0).xi_plus == 0.0);
    for (double d : {0.03, -0.04}) {
        const auto q = two_state(0.1 + d, 0.2 - d);
        const auto nu = dtmc_stationary(q);
        const auto pi = dtmc_stationary(p);
        const double rer = rer_dtmc(q, p, nu);
        const auto g = xi_infinite(h, rer);
        const double gap = nu[1] - pi[1]; // stationary means of the indicator
        REQUIRE(gap <= g.xi_plus + 1e-9);
        REQUIRE(gap >= g.xi_minus - 1e-9);
    }
}

TEST_CASE("path sensitivity bounds") {
    const BirthDeath bd(2.0, 1.0);
    const OUModel ou(1.0, 0.0, 1.0);
    const auto bd_path = exact_fisher(bd.path_fim(), FisherProvenance::path);
    SECTION("table values") {
        REQUIRE_THAT(path_sens_bound_infinite(bd.iat_f1(), bd_path, std::vector<double>{1.0, 0.0}),
                     Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-12));
        SquareMatrix ou_euler(3);
        const auto d = ou.path_fim_euler_diag(0.01);
        for (int i = 0; i < 3; ++i) ou_euler(i, i) = d[static_cast<std::size_t>(i)];
        const auto ou_fim = exact_fisher(ou_euler, FisherProvenance::path_euler);
        REQUIRE_THAT(path_sens_bound_infinite(ou.iat_x(), ou_fim, std::vector<double>{0.0, 1.0, 0.0}),
                     Catch::Matchers::WithinRel(1.0, 1e-12));
        REQUIRE_THAT(path_sens_bound_infinite(ou.iat_x(), ou_fim, std::vector<double>{0.0, 0.0, 1.0}),
                     Catch::Matchers::WithinRel(14.142135623730951, 1e-10));
    }
    SECTION("degenerate directions and inputs") {
        REQUIRE(path_sens_bound_infinite(4.0, bd_path, std::vector<double>{0.0, 0.0}) == 0.0);
        REQUIRE_THROWS_AS(path_sens_bound_infinite(-1.0, bd_path, std::vector<double>{1.0, 0.0}),
                          std::invalid_argument);
    }
    SECTION("finite horizon reduces to the infinite bound as T grows") {
        const auto bd_stat = exact_fisher(bd.stationary_fim(), FisherProvenance::static_measure);
        const std::vector<double> v = {1.0, 0.0};
        const double inf_bound = path_sens_bound_infinite(bd.iat_f1(), bd_path, v);
        const double finite = path_sens_bound_stationary(bd.iat_f1(), bd_path, bd_stat, 1e9, v);
        REQUIRE_THAT(finite, Catch::Matchers::WithinRel(inf_bound, 1e-6));
        REQUIRE(path_sens_bound_stationary(bd.iat_f1(), bd_path, bd_stat, 50.0, v) >= inf_bound);
    }
    SECTION("transient variant uses the horizon-normalized FIM") {
        const auto e = ssa(bd.ctmc_spec(), SimConfig{400, 50.0, 0.0, bd.default_burn_in(), 23, 4});
        const auto horizon_fim = pfim_ctmc_transient(bd.ctmc_spec(), e);
        const std::vector<double> v = {1.0, 0.0};
        const double b = path_sens_bound_transient(bd.iat_f1(), horizon_fim, e.horizon, v);
        REQUIRE_THAT(b, Catch::Matchers::WithinRel(std::sqrt(2.0), 0.1));
    }
    SECTION("uniform-variance form") {
        REQUIRE(path_sens_bound_uniform(0.0, bd_path, std::vector<double>{1.0, 0.0}) == 0.0);
        REQUIRE_THAT(path_sens_bound_uniform(std::sqrt(bd.iat_f1()), bd_path,
                                             std::vector<double>{1.0, 0.0}),
                     Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-12));
    }
}

TEST_CASE("path bound dominates finite-difference ergodic sensitivities") {
    SECTION("birth/death, k1 direction") {
        const double eps = 0.05;
        const BirthDeath bd(2.0, 1.0);
        // common random numbers: the same stream drives both perturbations
        auto ergodic_means = [](const BirthDeath& m, std::uint64_t seed) {
            const auto e = ssa(m.ctmc_spec(), SimConfig{300, 50.0, 0.0, m.default_burn_in(), seed, 4});
            std::vector<double> out(e.paths.size());
            for (std::size_t i = 0; i < e.paths.size(); ++i) {
                const auto& p = e.paths[i];
                double acc = 0.0;
                for (std::size_t k = 0; k < p.t.size(); ++k) {
                    const double t_end = (k + 1 < p.t.size()) ? p.t[k + 1] : e.horizon;
                    acc += p.x[k] * (t_end - p.t[k]);
                }
                out[i] = acc / e.horizon;
            }
            return out;
        };
        const auto up = ergodic_means(BirthDeath(2.0 + eps, 1.0), 12345);
        const auto down = ergodic_means(BirthDeath(2.0 - eps, 1.0), 12345);
        std::vector<double> diffs(up.size());
        for (std::size_t i = 0; i < up.size(); ++i) diffs[i] = (up[i] - down[i]) / (2.0 * eps);
        const auto fd = mean_with_stderr(diffs);
        const double bound = path_sens_bound_infinite(
            bd.iat_f1(), exact_fisher(bd.path_fim(), FisherProvenance::path),
            std::vector<double>{1.0, 0.0});
        REQUIRE(std::abs(fd.value) <= bound + 3.0 * fd.stderr_);
        // the index itself is 1/k2 = 1
        REQUIRE(std::abs(fd.value - 1.0) <= 4.0 * fd.stderr_);
    }
    SECTION("OU, beta direction attains the unit bound") {
        const double eps = 0.01;
        auto final_means = [](double beta, std::uint64_t seed) {
            const OUModel m(1.0, beta, 1.0);
            const auto e = euler_maruyama(m.sde_spec(), SimConfig{200, 20.0, 0.01, 0.0, seed, 4});
            std::vector<double> out(e.paths.size());
            for (std::size_t i = 0; i < e.paths.size(); ++i) out[i] = mean(e.paths[i].x);
            return out;
        };
        const auto up = final_means(eps, 777);
        const auto down = final_means(-eps, 777);
        std::vector<double> diffs(up.size());
        for (std::size_t i = 0; i < up.size(); ++i) diffs[i] = (up[i] - down[i]) / (2.0 * eps);
        const auto fd = mean_with_stderr(diffs);
        const OUModel ou(1.0, 0.0, 1.0);
        SquareMatrix euler(3);
        const auto d = ou.path_fim_euler_diag(0.01);
        for (int i = 0; i < 3; ++i) euler(i, i) = d[static_cast<std::size_t>(i)];
        const double bound = path_sens_bound_infinite(
            ou.iat_x(), exact_fisher(euler, FisherProvenance::path_euler),
            std::vector<double>{0.0, 1.0, 0.0});
        REQUIRE(std::abs(fd.value) <= bound + 3.0 * fd.stderr_ + 0.02);
        REQUIRE_THAT(fd.value, Catch::Matchers::WithinAbs(1.0, 0.05));
    }
}

TEST_CASE("path-space cramer-rao lower bound") {
    REQUIRE(cramer_rao_path(0.0, 0.5) == 0.0);
    const BirthDeath bd(2.0, 1.0);
    // estimating k1 through the stationary mean: psi' = 1/k2, F = 1/k1
    const double cr = cramer_rao_path(1.0 / bd.k2, 1.0 / bd.k1);
    REQUIRE_THAT(cr, Catch::Matchers::WithinRel(2.0, 1e-12));
    REQUIRE(bd.iat_f1() >= cr);
    REQUIRE_THROWS_AS(cramer_rao_path(1.0, 0.0), std::invalid_argument);
}
