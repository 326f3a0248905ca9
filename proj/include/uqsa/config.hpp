#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqsa/markov.hpp"
#include "uqsa/model_zoo.hpp"
#include "uqsa/simulate.hpp"

namespace uqsa {

/// Parsed model configuration file:
///   { "model": {"type": ..., "params": {...}},
///     "sim":   {"n_paths", "horizon", "dt", "burn_in", "seed"} }
/// Validation is strict: unknown keys anywhere are rejected.
struct ModelConfig {
    enum class Type { dtmc, ctmc, sde, lognormal, expfam };
    Type type = Type::ctmc;

    FiniteDtmc dtmc;           // type == dtmc
    bool ctmc_is_birth_death = false;
    BirthDeath birth_death;    // type == ctmc (k1/k2 form)
    CtmcSpec ctmc_rates;       // type == ctmc (explicit rate matrix)
    OUModel ou;                // type == sde
    LogNormalDecay lognormal;  // type == lognormal
    std::string expfam_name;   // type == expfam
    std::vector<double> expfam_theta;

    SimConfig sim;
    bool burn_in_given = false;

    /// Burn-in actually used: the configured value, else ten mixing times
    /// of the slowest analytic rate when the model declares one.
    double effective_burn_in() const {
        if (burn_in_given) return sim.burn_in;
        switch (type) {
            case Type::ctmc: return ctmc_is_birth_death ? birth_death.default_burn_in() : 0.0;
            case Type::sde: return ou.default_burn_in();
            default: return 0.0;
        }
    }
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

inline double num(const nlohmann::json& obj, const std::string& key, double fallback,
                  bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw std::invalid_argument("config: missing key '" + key + "'");
        return fallback;
    }
    if (!obj[key].is_number()) throw std::invalid_argument("config: '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::vector<std::vector<double>> matrix(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("config: '" + key + "' must be a nonempty array of rows");
    std::vector<std::vector<double>> m;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument("config: '" + key + "' rows must be arrays");
        m.emplace_back();
        for (const auto& v : row) m.back().push_back(v.get<double>());
        if (m.back().size() != m.front().size())
            throw std::invalid_argument("config: '" + key + "' rows have unequal lengths");
    }
    if (m.size() != m.front().size())
        throw std::invalid_argument("config: '" + key + "' must be square");
    return m;
}

} // namespace detail

inline ModelConfig parse_model_config(const nlohmann::json& j) {
    detail::require_keys(j, "document", {"model", "sim"});
    if (!j.contains("model")) throw std::invalid_argument("config: missing 'model'");
    const auto& model = j["model"];
    detail::require_keys(model, "model", {"type", "params"});
    if (!model.contains("type") || !model["type"].is_string())
        throw std::invalid_argument("config: model.type must be a string");
    const std::string type = model["type"].get<std::string>();
    const nlohmann::json params =
        model.contains("params") ? model["params"] : nlohmann::json::object();

    ModelConfig cfg;
    if (type == "dtmc") {
        cfg.type = ModelConfig::Type::dtmc;
        detail::require_keys(params, "params", {"kernel", "initial"});
        if (!params.contains("kernel")) throw std::invalid_argument("config: dtmc needs 'kernel'");
        const auto m = detail::matrix(params["kernel"], "kernel");
        cfg.dtmc.n_states = static_cast<int>(m.size());
        for (const auto& row : m)
            cfg.dtmc.kernel.insert(cfg.dtmc.kernel.end(), row.begin(), row.end());
        if (params.contains("initial")) {
            for (const auto& v : params["initial"]) cfg.dtmc.initial.push_back(v.get<double>());
        }
        cfg.dtmc.validate();
    } else if (type == "ctmc") {
        cfg.type = ModelConfig::Type::ctmc;
        if (params.contains("rates")) {
            detail::require_keys(params, "params", {"rates", "initial_state"});
            const auto m = detail::matrix(params["rates"], "rates");
            cfg.ctmc_rates.n_states = static_cast<int>(m.size());
            for (const auto& row : m)
                cfg.ctmc_rates.rates.insert(cfg.ctmc_rates.rates.end(), row.begin(), row.end());
            cfg.ctmc_rates.initial_state =
                static_cast<int>(detail::num(params, "initial_state", 0.0));
            cfg.ctmc_rates.validate();
        } else {
            detail::require_keys(params, "params", {"k1", "k2"});
            cfg.ctmc_is_birth_death = true;
            cfg.birth_death = BirthDeath(detail::num(params, "k1", 0.0, true),
                                         detail::num(params, "k2", 0.0, true));
        }
    } else if (type == "sde") {
        cfg.type = ModelConfig::Type::sde;
        detail::require_keys(params, "params", {"alpha", "beta", "gamma"});
        cfg.ou = OUModel(detail::num(params, "alpha", 0.0, true),
                         detail::num(params, "beta", 0.0, true),
                         detail::num(params, "gamma", 0.0, true));
    } else if (type == "lognormal") {
        cfg.type = ModelConfig::Type::lognormal;
        detail::require_keys(params, "params", {"u0", "mu", "sigma", "threshold", "t"});
        cfg.lognormal = LogNormalDecay(
            detail::num(params, "u0", 0.0, true), detail::num(params, "mu", 0.0, true),
            detail::num(params, "sigma", 0.0, true), detail::num(params, "threshold", 0.0, true),
            detail::num(params, "t", 0.0, true));
    } else if (type == "expfam") {
        cfg.type = ModelConfig::Type::expfam;
        detail::require_keys(params, "params", {"family", "theta"});
        if (!params.contains("family") || !params["family"].is_string())
            throw std::invalid_argument("config: expfam needs a 'family' string");
        cfg.expfam_name = params["family"].get<std::string>();
        if (cfg.expfam_name != "gaussian" && cfg.expfam_name != "poisson" &&
            cfg.expfam_name != "bernoulli")
            throw std::invalid_argument("config: unknown expfam family " + cfg.expfam_name);
        if (!params.contains("theta")) throw std::invalid_argument("config: expfam needs 'theta'");
        for (const auto& v : params["theta"]) cfg.expfam_theta.push_back(v.get<double>());
    } else {
        throw std::invalid_argument("config: unknown model type '" + type + "'");
    }

    if (j.contains("sim")) {
        const auto& sim = j["sim"];
        detail::require_keys(sim, "sim", {"n_paths", "horizon", "dt", "burn_in", "seed"});
        cfg.sim.n_paths = static_cast<int>(detail::num(sim, "n_paths", 100.0));
        cfg.sim.horizon = detail::num(sim, "horizon", 50.0);
        cfg.sim.dt = detail::num(sim, "dt", 0.0);
        cfg.burn_in_given = sim.contains("burn_in");
        cfg.sim.burn_in = detail::num(sim, "burn_in", 0.0);
        cfg.sim.seed = static_cast<std::uint64_t>(detail::num(sim, "seed", 0.0));
    }
    cfg.sim.burn_in = cfg.effective_burn_in();
    cfg.burn_in_given = true;
    return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
    }
    return parse_model_config(j);
}

} // namespace uqsa
