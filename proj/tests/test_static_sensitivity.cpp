#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "uqsa/model_zoo.hpp"
#include "uqsa/static_sensitivity.hpp"

using namespace uqsa;

TEST_CASE("fim_monte_carlo recovers closed forms") {
    SECTION("gaussian location") {
        const auto fam = gaussian_location_family(1.0);
        const std::vector<double> theta = {0.3};
        const auto f = fim_monte_carlo(fam, theta, 200000, 11);
        REQUIRE(std::abs(f.entries(0, 0) - 1.0) <= 4.0 * f.stderr_(0, 0));
        REQUIRE(f.min_eig() >= -1e-8);
    }
    SECTION("poisson") {
        const auto fam = poisson_family();
        const std::vector<double> theta = {2.0};
        const auto f = fim_monte_carlo(fam, theta, 200000, 12);
        REQUIRE(std::abs(f.entries(0, 0) - 0.5) <= 4.0 * f.stderr_(0, 0));
    }
    SECTION("OU stationary family reproduces the full matrix, couplings included") {
        const OUModel ou(1.0, 0.5, 1.0);
        const auto fam = ou.stationary_family();
        const std::vector<double> theta = {1.0, 0.5, 1.0};
        const auto f = fim_monte_carlo(fam, theta, 400000, 29);
        const auto exact = ou.stationary_fim(); // alpha-gamma block couples
        REQUIRE(exact(0, 2) == -1.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(std::abs(f.entries(i, j) - exact(i, j)) <=
                        4.0 * std::max(f.stderr_(i, j), 1e-12));
        REQUIRE(f.min_eig() >= -1e-8);
    }
    SECTION("birth/death stationary matches the exponential-family Hessian") {
        const BirthDeath bd(2.0, 1.0);
        const auto fam = bd.stationary_family();
        const std::vector<double> theta = {2.0, 1.0};
        const auto f = fim_monte_carlo(fam, theta, 400000, 13);
        const auto exact = bd.stationary_fim();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(std::abs(f.entries(i, j) - exact(i, j)) <=
                        4.0 * std::max(f.stderr_(i, j), 1e-12));
        REQUIRE(max_asymmetry(f.entries) <= 1e-10);
    }
    REQUIRE_THROWS_AS(fim_monte_carlo(poisson_family(), std::vector<double>{1.0}, 1, 1),
                      std::invalid_argument);
}

TEST_CASE("score identity: mean gradient vanishes") {
    const auto fam = gaussian_location_family(1.0);
    const std::vector<double> theta = {1.5};
    const auto draws = fam.sampler(theta, 99, 100000);
    std::vector<double> scores(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i)
        scores[i] = fam.grad_log_density(theta, draws[i])[0];
    const auto ms = mean_with_stderr(scores);
    REQUIRE(std::abs(ms.value) <= 4.0 * ms.stderr_);
}

TEST_CASE("gradient callbacks match finite differences") {
    for (const auto& fam : {gaussian_location_family(0.7), poisson_family()}) {
        const std::vector<double> theta = {1.3};
        const std::vector<double> probes = {0.0, 1.0, 2.0, 5.0};
        REQUIRE(check_grad_consistency(fam, theta, probes) <= 1e-5);
    }
    const std::vector<double> bd_theta = {2.0, 1.0};
    const std::vector<double> probes = {0.0, 1.0, 3.0, 6.0};
    REQUIRE(check_grad_consistency(BirthDeath(2, 1).stationary_family(), bd_theta, probes) <= 1e-5);
}

TEST_CASE("relent_quadratic_check") {
    SECTION("zero perturbation") {
        const auto fam = gaussian_location_family(1.0);
        const auto r = relent_quadratic_check(fam, std::vector<double>{0.0},
                                              std::vector<double>{1.0}, 0.0);
        REQUIRE(r.re == 0.0);
        REQUIRE(r.quad == 0.0);
    }
    SECTION("gaussian location is exactly quadratic") {
        const auto fam = gaussian_location_family(1.0);
        for (double eps : {0.3, 0.05}) {
            const auto r = relent_quadratic_check(fam, std::vector<double>{0.2},
                                                  std::vector<double>{1.0}, eps);
            REQUIRE_THAT(r.re, Catch::Matchers::WithinRel(0.5 * eps * eps, 1e-12));
            REQUIRE_THAT(r.quad, Catch::Matchers::WithinRel(0.5 * eps * eps, 1e-12));
        }
    }
    SECTION("sampled fallback without closed-form hooks") {
        auto fam = gaussian_location_family(1.0);
        fam.exact_relative_entropy = nullptr;
        fam.exact_fisher = nullptr;
        const double eps = 0.2;
        const auto r = relent_quadratic_check(fam, std::vector<double>{0.0},
                                              std::vector<double>{1.0}, eps, 400000, 7);
        REQUIRE_THAT(r.re, Catch::Matchers::WithinAbs(0.5 * eps * eps, 5e-3));
        REQUIRE_THAT(r.quad, Catch::Matchers::WithinRel(0.5 * eps * eps, 0.05));
    }
    SECTION("bernoulli residual is third order") {
        const auto fam = bernoulli_family();
        double eps = 0.02;
        double prev_ratio = 0.0;
        for (int i = 0; i < 4; ++i) {
            const auto r = relent_quadratic_check(fam, std::vector<double>{0.5},
                                                  std::vector<double>{1.0}, eps);
            const double ratio = std::abs(r.re - r.quad) / (eps * eps * eps);
            if (i > 0) REQUIRE(ratio <= prev_ratio * 2.0 + 1.0);
            prev_ratio = ratio;
            eps *= 0.5;
        }
    }
}

TEST_CASE("sensitivity_index_lr closed forms") {
    SECTION("constant observable gives zero covariance") {
        const auto fam = gaussian_location_family(1.0);
        Observable constant{"const", [](double) { return 3.0; }, 3.0, 3.0};
        const auto s = sensitivity_index_lr(fam, std::vector<double>{0.0},
                                            std::vector<double>{1.0}, constant, 5000, 3);
        REQUIRE(s.value == 0.0);
    }
    SECTION("gaussian mean responds with unit slope") {
        const auto fam = gaussian_location_family(1.0);
        const auto s = sensitivity_index_lr(fam, std::vector<double>{0.0},
                                            std::vector<double>{1.0},
                                            Observable::identity(), 200000, 4);
        REQUIRE(std::abs(s.value - 1.0) <= 4.0 * s.stderr_);
    }
    SECTION("birth/death mean responds as 1/k2 along k1") {
        const BirthDeath bd(2.0, 1.0);
        const auto s = sensitivity_index_lr(bd.stationary_family(), std::vector<double>{2.0, 1.0},
                                            std::vector<double>{1.0, 0.0},
                                            Observable::identity(), 400000, 5);
        REQUIRE(std::abs(s.value - 1.0) <= 4.0 * s.stderr_);
    }
    REQUIRE_THROWS_AS(sensitivity_index_lr(gaussian_location_family(), std::vector<double>{0.0},
                                           std::vector<double>{1.0}, Observable::identity(), 1, 1),
                      std::invalid_argument);
}

TEST_CASE("sensitivity_bound_static") {
    const BirthDeath bd(2.0, 1.0);
    const auto stat = exact_fisher(bd.stationary_fim(), FisherProvenance::static_measure);
    // (k1, k2) spans the null space of the stationary FIM: only the ratio is inferable
    REQUIRE_THAT(sensitivity_bound_static(bd.var_f1(), stat, std::vector<double>{2.0, 1.0}),
                 Catch::Matchers::WithinAbs(0.0, 1e-7));
    REQUIRE_THAT(sensitivity_bound_static(bd.var_f1(), stat, std::vector<double>{1.0, 0.0}),
                 Catch::Matchers::WithinRel(1.0, 1e-12));
    const OUModel ou(1.0, 0.0, 1.0);
    const auto ou_stat = exact_fisher(ou.stationary_fim(), FisherProvenance::static_measure);
    REQUIRE_THAT(sensitivity_bound_static(ou.stationary_var(), ou_stat,
                                          std::vector<double>{0.0, 1.0, 0.0}),
                 Catch::Matchers::WithinRel(1.0, 1e-12));
    REQUIRE_THROWS_AS(sensitivity_bound_static(-1.0, stat, std::vector<double>{1.0, 0.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(sensitivity_bound_static(1.0, stat, std::vector<double>{0.0, 0.0}),
                      std::invalid_argument);
}

TEST_CASE("bound dominance for the likelihood-ratio index") {
    const BirthDeath bd(2.0, 1.0);
    const auto fam = bd.stationary_family();
    const std::vector<double> theta = {2.0, 1.0};
    std::mt19937_64 gen(31);
    std::normal_distribution<double> dir;
    const auto fim = fim_monte_carlo(fam, theta, 200000, 17);
    const auto draws = fam.sampler(theta, 18, 200000);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v = {dir(gen), dir(gen)};
        if (v[0] == 0.0 && v[1] == 0.0) continue;
        for (const auto& f : {Observable::identity(), Observable::second_central(2.0)}) {
            const auto idx = sensitivity_index_lr(fam, theta, v, f, 200000, 19);
            std::vector<double> fs(draws.size());
            for (std::size_t i = 0; i < draws.size(); ++i) fs[i] = f(draws[i]);
            const double bound = sensitivity_bound_static(variance(fs), fim, v);
            REQUIRE(std::abs(idx.value) <= bound + 3.0 * idx.stderr_ + 1e-6);
        }
    }
}

TEST_CASE("finite differences with common random numbers agree with the LR index") {
    const auto fam = gaussian_location_family(1.0);
    const std::vector<double> theta = {0.5};
    const std::vector<double> v = {1.0};
    const int n = 200000;
    const double eps = 1e-2;
    const auto idx = sensitivity_index_lr(fam, theta, v, Observable::identity(), n, 23);
    const auto up = fam.sampler(std::vector<double>{theta[0] + eps}, 23, n);
    const auto down = fam.sampler(std::vector<double>{theta[0] - eps}, 23, n);
    std::vector<double> diffs(up.size());
    for (std::size_t i = 0; i < up.size(); ++i) diffs[i] = (up[i] - down[i]) / (2.0 * eps);
    const auto fd = mean_with_stderr(diffs);
    REQUIRE(std::abs(fd.value - idx.value) <= 3.0 * (fd.stderr_ + idx.stderr_) + 1e-9);
}

TEST_CASE("cramer-rao equality for the gaussian location estimator") {
    // Var(x) * F = 1 with psi' = 1: the static Cramer-Rao bound is attained
    const auto fam = gaussian_location_family(1.0);
    const auto draws = fam.sampler(std::vector<double>{0.0}, 41, 200000);
    const double var = variance(draws);
    REQUIRE_THAT(var * 1.0, Catch::Matchers::WithinRel(1.0, 0.02));
    REQUIRE(var >= 1.0 / 1.0 - 0.02);
}

TEST_CASE("expfam_sufficient_bound") {
    SquareMatrix h(2);
    h(0, 0) = 1.0;
    h(1, 1) = 4.0;
    const auto diag = expfam_sufficient_bound(h, 0, 0);
    REQUIRE(diag.equality);
    REQUIRE_THAT(diag.bound, Catch::Matchers::WithinRel(1.0, 1e-15));
    const auto off = expfam_sufficient_bound(h, 0, 1);
    REQUIRE_FALSE(off.equality);
    REQUIRE_THAT(off.bound, Catch::Matchers::WithinRel(2.0, 1e-15));
    h(0, 0) = -1.0;
    REQUIRE_THROWS_AS(expfam_sufficient_bound(h, 0, 1), std::invalid_argument);

    // geometric mean never exceeds the arithmetic mean on PSD probes
    std::mt19937_64 gen(5);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 100; ++trial) {
        SquareMatrix a(3);
        for (auto& v : a.a) v = z(gen);
        SquareMatrix psd(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += a(k, i) * a(k, j);
                psd(i, j) = s;
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(expfam_sufficient_bound(psd, i, j).bound <=
                        0.5 * (psd(i, i) + psd(j, j)) + 1e-12);
    }
}
