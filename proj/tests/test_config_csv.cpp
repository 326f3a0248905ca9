#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "uqsa/config.hpp"
#include "uqsa/csv.hpp"

using namespace uqsa;

TEST_CASE("csv float formatting") {
    REQUIRE(csv_float(0.5) == "0.5");
    REQUIRE(csv_float(kInf) == "inf");
    REQUIRE(csv_float(-kInf) == "-inf");
    // 17 significant digits round-trip doubles exactly
    const double v = 0.1 + 0.2;
    REQUIRE(std::stod(csv_float(v)) == v);
    REQUIRE(csv_float(v) == "0.30000000000000004");
}

TEST_CASE("csv rows") {
    std::ostringstream os;
    csv_row(os, {"a", "b", "c"});
    REQUIRE(os.str() == "a,b,c\n");
}

TEST_CASE("ensemble csv dump") {
    PathEnsemble e;
    e.kind = PathEnsemble::Kind::events;
    e.dim = 1;
    e.horizon = 2.0;
    Path p;
    p.t = {0.0, 0.75};
    p.x = {1.0, 2.0};
    e.paths.push_back(p);
    std::ostringstream os;
    write_ensemble_csv(os, e);
    REQUIRE(os.str() == "path_id,t,state\n0,0,1\n0,0.75,2\n");
}

TEST_CASE("model config parsing") {
    SECTION("birth/death ctmc with defaults") {
        const auto j = nlohmann::json::parse(R"({
            "model": {"type": "ctmc", "params": {"k1": 2.0, "k2": 1.0}},
            "sim": {"n_paths": 10, "horizon": 5.0, "seed": 42}
        })");
        const auto cfg = parse_model_config(j);
        REQUIRE(cfg.type == ModelConfig::Type::ctmc);
        REQUIRE(cfg.ctmc_is_birth_death);
        REQUIRE(cfg.birth_death.k1 == 2.0);
        REQUIRE(cfg.sim.seed == 42);
        // burn-in defaults to ten mixing times of the slow rate
        REQUIRE(cfg.sim.burn_in == 10.0);
    }
    SECTION("sde model") {
        const auto j = nlohmann::json::parse(R"({
            "model": {"type": "sde", "params": {"alpha": 1.0, "beta": 0.0, "gamma": 1.0}},
            "sim": {"dt": 0.01, "burn_in": 3.0}
        })");
        const auto cfg = parse_model_config(j);
        REQUIRE(cfg.type == ModelConfig::Type::sde);
        REQUIRE(cfg.sim.dt == 0.01);
        REQUIRE(cfg.sim.burn_in == 3.0);
    }
    SECTION("explicit dtmc kernel") {
        const auto j = nlohmann::json::parse(R"({
            "model": {"type": "dtmc", "params": {"kernel": [[0.9, 0.1], [0.2, 0.8]]}}
        })");
        const auto cfg = parse_model_config(j);
        REQUIRE(cfg.dtmc.n_states == 2);
        REQUIRE(cfg.dtmc.p(1, 0) == 0.2);
    }
    SECTION("unknown keys are rejected everywhere") {
        REQUIRE_THROWS_AS(parse_model_config(nlohmann::json::parse(
                              R"({"model": {"type": "ctmc", "params": {"k1": 1, "k2": 1}}, "extra": 1})")),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(parse_model_config(nlohmann::json::parse(
                              R"({"model": {"type": "ctmc", "params": {"k1": 1, "k2": 1, "k3": 4}}})")),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(
            parse_model_config(nlohmann::json::parse(
                R"({"model": {"type": "ctmc", "params": {"k1": 1, "k2": 1}}, "sim": {"bogus": 2}})")),
            std::invalid_argument);
    }
    SECTION("malformed models are rejected") {
        REQUIRE_THROWS_AS(
            parse_model_config(nlohmann::json::parse(R"({"model": {"type": "nope"}})")),
            std::invalid_argument);
        REQUIRE_THROWS_AS(parse_model_config(nlohmann::json::parse(
                              R"({"model": {"type": "dtmc", "params": {"kernel": [[0.5, 0.4], [0.2, 0.8]]}}})")),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(parse_model_config(nlohmann::json::parse(
                              R"({"model": {"type": "expfam", "params": {"family": "cauchy", "theta": [1]}}})")),
                          std::invalid_argument);
    }
}
