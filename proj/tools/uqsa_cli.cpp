// uqsa command-line front end: model configs in, CSV tables out.
//
// Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
// All floats are serialized with 17 significant digits and infinities as the
// literal `inf`, so outputs for a fixed (flags, seed) pair are byte-identical
// across runs. UQSA_SEED overrides the config seed.

#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uqsa/config.hpp"
#include "uqsa/uqsa.hpp"

namespace {

using namespace uqsa;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file " + path);
    return out;
}

std::ostream& pick_stream(std::optional<std::ofstream>& file, const std::string& out_path) {
    if (out_path.empty()) return std::cout;
    file.emplace(open_out(out_path));
    return *file;
}

std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open sample file " + path);
    std::vector<double> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        samples.push_back(std::stod(line));
    }
    if (samples.empty()) throw std::invalid_argument("sample file is empty: " + path);
    return samples;
}

// Distribution file: header `value,prob`, one support point per line.
DiscreteDist read_dist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open distribution file " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("value,prob", 0) != 0)
        throw std::invalid_argument("distribution file must start with 'value,prob': " + path);
    std::vector<double> values, probs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("bad distribution row: " + line);
        values.push_back(std::stod(line.substr(0, comma)));
        probs.push_back(std::stod(line.substr(comma + 1)));
    }
    return DiscreteDist(std::move(values), std::move(probs));
}

std::vector<double> parse_direction(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.empty()) throw std::invalid_argument("empty direction");
    return v;
}

std::string join_direction(std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += csv_float(v[i]);
    }
    return s;
}

void apply_seed_override(ModelConfig& cfg) {
    if (const char* env = std::getenv("UQSA_SEED"))
        cfg.sim.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
}

double model_stationary_mean(const ModelConfig& cfg) {
    switch (cfg.type) {
        case ModelConfig::Type::ctmc:
            return cfg.ctmc_is_birth_death ? cfg.birth_death.stationary_mean() : 0.0;
        case ModelConfig::Type::sde: return cfg.ou.stationary_mean();
        default: return 0.0;
    }
}

// ---------------------------------------------------------------------------
// divergence
// ---------------------------------------------------------------------------

struct DivergenceOpts {
    std::string p_samples, p_dist, q_dist, observable = "mean", out;
    double rho2 = -1.0;
};

int run_divergence(const DivergenceOpts& o) {
    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    csv_row(os, {"rho2", "xi_plus", "xi_minus", "c_star_plus", "c_star_minus", "linearized",
                 "ckp", "chi2_bound", "saturated"});

    double rho2 = 0.0, var = 0.0, sup_norm = 0.0;
    std::string chi2_cell;
    GoalDivergence g;
    if (!o.p_samples.empty()) {
        if (o.rho2 < 0.0)
            throw std::invalid_argument("--p-samples requires --rho2 >= 0");
        const auto samples = read_samples(o.p_samples);
        const CgfHandle h = CgfHandle::empirical(samples);
        rho2 = o.rho2;
        var = h.variance();
        for (double s : samples) sup_norm = std::max(sup_norm, std::abs(s));
        g = xi_bounds(h, rho2);
    } else {
        if (o.p_dist.empty() || o.q_dist.empty())
            throw std::invalid_argument("need --p-samples or both --p-dist and --q-dist");
        const DiscreteDist p = read_dist(o.p_dist);
        const DiscreteDist q = read_dist(o.q_dist);
        const Observable f = make_observable(o.observable);
        std::vector<double> fv(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) fv[i] = f(p.support[i]);
        rho2 = relative_entropy(q, p);
        if (!std::isfinite(rho2)) throw std::runtime_error("relative entropy is infinite");
        const CgfHandle h = CgfHandle::from_discrete(p, fv);
        var = h.variance();
        for (std::size_t i = 0; i < p.size(); ++i) sup_norm = std::max(sup_norm, std::abs(fv[i]));
        g = xi_bounds(h, rho2);
        chi2_cell = csv_float(chi2_comparison_bound(var, chi_squared(q, p)));
    }
    csv_row(os, {csv_float(rho2), csv_float(g.xi_plus), csv_float(g.xi_minus),
                 g.c_star_plus ? csv_float(*g.c_star_plus) : std::string(),
                 g.c_star_minus ? csv_float(*g.c_star_minus) : std::string(),
                 csv_float(linearized_xi(var, rho2)), csv_float(ckp_bound(sup_norm, rho2)),
                 chi2_cell, (g.saturated_plus || g.saturated_minus) ? "1" : "0"});
    return 0;
}

// ---------------------------------------------------------------------------
// fim
// ---------------------------------------------------------------------------

struct FimOpts {
    std::string model, mode = "static", out;
    int samples = 100000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
};

void write_fim_csv(std::ostream& os, const FisherMatrix& f) {
    csv_row(os, {"i", "j", "value", "stderr"});
    for (int i = 0; i < f.dim(); ++i)
        for (int j = 0; j < f.dim(); ++j)
            csv_row(os, {std::to_string(i), std::to_string(j), csv_float(f.entries(i, j)),
                         csv_float(f.stderr_(i, j))});
}

FisherMatrix compute_fim(const ModelConfig& cfg, const std::string& mode, int samples,
                         std::uint64_t seed, int threads) {
    if (mode == "static") {
        switch (cfg.type) {
            case ModelConfig::Type::ctmc: {
                if (!cfg.ctmc_is_birth_death)
                    throw std::invalid_argument("static FIM needs a birth/death ctmc model");
                const auto fam = cfg.birth_death.stationary_family();
                const std::vector<double> th = {cfg.birth_death.k1, cfg.birth_death.k2};
                return fim_monte_carlo(fam, th, samples, seed);
            }
            case ModelConfig::Type::sde: {
                const auto fam = cfg.ou.stationary_family();
                const std::vector<double> th = {cfg.ou.alpha, cfg.ou.beta, cfg.ou.gamma};
                return fim_monte_carlo(fam, th, samples, seed);
            }
            case ModelConfig::Type::expfam: {
                ExpFamily fam = cfg.expfam_name == "gaussian" ? ExpFamily::gaussian_natural()
                                : cfg.expfam_name == "poisson" ? ExpFamily::poisson_natural()
                                                               : ExpFamily::bernoulli_natural();
                return exact_fisher(fam.hess_log_normalizer(cfg.expfam_theta),
                                    FisherProvenance::static_measure);
            }
            case ModelConfig::Type::lognormal: {
                const auto s = cfg.lognormal.sensitivities();
                SquareMatrix m(2);
                m(0, 0) = s.fim_mu;
                m(1, 1) = s.fim_sigma;
                return exact_fisher(m, FisherProvenance::static_measure);
            }
            default:
                throw std::invalid_argument("static FIM is not available for this model type");
        }
    }
    if (mode == "path") {
        switch (cfg.type) {
            case ModelConfig::Type::ctmc: {
                if (!cfg.ctmc_is_birth_death)
                    throw std::invalid_argument("path FIM needs parameter gradients (birth/death)");
                return pfim_ctmc(cfg.birth_death.ctmc_spec(), samples, seed);
            }
            case ModelConfig::Type::sde: {
                if (cfg.sim.dt > 0.0)
                    return pfim_euler(cfg.ou.euler_chain(cfg.sim.dt), cfg.sim.dt, samples, seed);
                // continuous time: finite drift block, singular diffusion entry
                RngStream rng(seed);
                std::vector<std::vector<double>> draws(static_cast<std::size_t>(samples));
                const auto sde = cfg.ou.sde_spec();
                for (auto& x : draws) x = sde.sample_stationary(rng);
                const FisherMatrix drift = pfim_sde(sde, draws);
                FisherMatrix full(3, FisherProvenance::path);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        full.entries(i, j) = drift.entries(i, j);
                        full.stderr_(i, j) = drift.stderr_(i, j);
                    }
                full.entries(2, 2) = kInf;
                return full;
            }
            default:
                throw std::invalid_argument("path FIM is not available for this model type");
        }
    }
    (void)threads;
    throw std::invalid_argument("unknown FIM mode '" + mode + "' (use static|path)");
}

int run_fim(const FimOpts& o) {
    ModelConfig cfg = load_model_config(o.model);
    apply_seed_override(cfg);
    const std::uint64_t seed = o.seed_given ? o.seed : cfg.sim.seed;
    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    write_fim_csv(os, compute_fim(cfg, o.mode, o.samples, seed, o.threads));
    return 0;
}

// ---------------------------------------------------------------------------
// sens
// ---------------------------------------------------------------------------

struct SensOpts {
    std::string model, observable = "mean", mode = "static", direction, out;
    int samples = 100000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double eps = 1e-2;
    double grid_dt = 0.0;
    int threads = 1;
};

struct ErgodicStats {
    MeanStderr mean;
    IatEstimate iat;
    double tau_T = 0.0;
    double horizon = 0.0;
};

PathEnsemble simulate_model(const ModelConfig& cfg, int threads) {
    SimConfig sim = cfg.sim;
    sim.threads = threads;
    switch (cfg.type) {
        case ModelConfig::Type::dtmc: return simulate_dtmc(cfg.dtmc, sim);
        case ModelConfig::Type::ctmc:
            return ssa(cfg.ctmc_is_birth_death ? cfg.birth_death.ctmc_spec() : cfg.ctmc_rates,
                       sim);
        case ModelConfig::Type::sde: {
            if (!(sim.dt > 0.0)) throw std::invalid_argument("sde simulation needs sim.dt > 0");
            return euler_maruyama(cfg.ou.sde_spec(), sim);
        }
        default: throw std::invalid_argument("this model type has no trajectory simulator");
    }
}

double model_mixing_time(const ModelConfig& cfg) {
    if (cfg.type == ModelConfig::Type::ctmc && cfg.ctmc_is_birth_death)
        return 1.0 / cfg.birth_death.k2;
    if (cfg.type == ModelConfig::Type::sde) return 1.0 / cfg.ou.alpha;
    return 1.0;
}

ErgodicStats ergodic_stats(const ModelConfig& cfg, const Observable& f, double grid_dt,
                           int threads) {
    const PathEnsemble e = simulate_model(cfg, threads);
    double dt = grid_dt;
    if (e.kind == PathEnsemble::Kind::events && !(dt > 0.0)) dt = 0.1 * model_mixing_time(cfg);
    const double lag_dt = (e.kind == PathEnsemble::Kind::events) ? dt : e.dt;
    const auto len = static_cast<std::size_t>(std::floor(e.horizon / lag_dt)) + 1;
    int max_lag = static_cast<int>(std::ceil(8.0 * model_mixing_time(cfg) / lag_dt));
    max_lag = std::min<int>(max_lag, static_cast<int>(len / 2));
    const AcfSeries acf = acf_estimate(e, f, max_lag, dt);

    ErgodicStats out;
    std::vector<double> path_means(e.paths.size());
    for (std::size_t i = 0; i < e.paths.size(); ++i)
        path_means[i] = mean(observable_series(e, e.paths[i], f, dt));
    out.mean = mean_with_stderr(path_means);
    out.iat = iat_infinite(acf);
    // windowed tau_T over the full horizon: keep lags up to the first
    // negative estimate, pad the (negligible) tail with zeros
    std::size_t cut = acf.acf.size();
    for (std::size_t k = 1; k < acf.acf.size(); ++k)
        if (acf.acf[k] < 0.0) {
            cut = k;
            break;
        }
    std::vector<double> windowed(static_cast<std::size_t>(std::floor(e.horizon / acf.dt)) + 1,
                                 0.0);
    for (std::size_t k = 0; k < cut && k < windowed.size(); ++k) windowed[k] = acf.acf[k];
    out.tau_T = iat_finite(windowed, e.horizon, acf.dt);
    out.horizon = e.horizon;
    return out;
}

MeanStderr finite_difference_index(const ModelConfig& cfg, const Observable& f,
                                   std::span<const double> v, double eps, double grid_dt,
                                   int threads) {
    // common random numbers: both perturbations reuse the config seed
    ModelConfig up = cfg, down = cfg;
    if (cfg.type == ModelConfig::Type::ctmc && cfg.ctmc_is_birth_death) {
        up.birth_death = BirthDeath(cfg.birth_death.k1 + eps * v[0],
                                    cfg.birth_death.k2 + eps * v[1]);
        down.birth_death = BirthDeath(cfg.birth_death.k1 - eps * v[0],
                                      cfg.birth_death.k2 - eps * v[1]);
    } else if (cfg.type == ModelConfig::Type::sde) {
        up.ou = OUModel(cfg.ou.alpha + eps * v[0], cfg.ou.beta + eps * v[1],
                        cfg.ou.gamma + eps * v[2]);
        down.ou = OUModel(cfg.ou.alpha - eps * v[0], cfg.ou.beta - eps * v[1],
                          cfg.ou.gamma - eps * v[2]);
    } else {
        throw std::invalid_argument("finite-difference index needs a ctmc or sde model");
    }
    const PathEnsemble e_up = simulate_model(up, threads);
    const PathEnsemble e_down = simulate_model(down, threads);
    double dt = grid_dt;
    if (e_up.kind == PathEnsemble::Kind::events && !(dt > 0.0))
        dt = 0.1 * model_mixing_time(cfg);
    std::vector<double> diffs(e_up.paths.size());
    for (std::size_t i = 0; i < e_up.paths.size(); ++i) {
        const double m_up = mean(observable_series(e_up, e_up.paths[i], f, dt));
        const double m_down = mean(observable_series(e_down, e_down.paths[i], f, dt));
        diffs[i] = (m_up - m_down) / (2.0 * eps);
    }
    return mean_with_stderr(diffs);
}

int run_sens(const SensOpts& o) {
    ModelConfig cfg = load_model_config(o.model);
    apply_seed_override(cfg);
    if (o.seed_given) cfg.sim.seed = o.seed;
    const int dim = cfg.type == ModelConfig::Type::ctmc ? 2
                    : cfg.type == ModelConfig::Type::sde ? 3
                                                         : 0;
    if (dim == 0) throw std::invalid_argument("sens needs a ctmc or sde model");
    auto v = parse_direction(o.direction);
    if (static_cast<int>(v.size()) != dim)
        throw std::invalid_argument("direction length must match the parameter dimension");
    v = normalized_direction(v); // throws on the zero direction
    const Observable f = make_observable(o.observable, model_stationary_mean(cfg));

    double bound = 0.0;
    MeanStderr index;
    if (o.mode == "static") {
        ParametricFamily fam;
        std::vector<double> theta;
        if (cfg.type == ModelConfig::Type::ctmc && cfg.ctmc_is_birth_death) {
            fam = cfg.birth_death.stationary_family();
            theta = {cfg.birth_death.k1, cfg.birth_death.k2};
        } else if (cfg.type == ModelConfig::Type::sde) {
            fam = cfg.ou.stationary_family();
            theta = {cfg.ou.alpha, cfg.ou.beta, cfg.ou.gamma};
        } else {
            throw std::invalid_argument("static sens needs a birth/death or sde model");
        }
        index = sensitivity_index_lr(fam, theta, v, f, o.samples, cfg.sim.seed);
        const auto draws = fam.sampler(theta, cfg.sim.seed + 1, o.samples);
        std::vector<double> fs(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) fs[i] = f(draws[i]);
        const FisherMatrix fim = fim_monte_carlo(fam, theta, o.samples, cfg.sim.seed + 2);
        bound = sensitivity_bound_static(variance(fs), fim, v);
    } else if (o.mode == "path-inf" || o.mode == "path-T") {
        index = finite_difference_index(cfg, f, v, o.eps, o.grid_dt, o.threads);
        const auto stats = ergodic_stats(cfg, f, o.grid_dt, o.threads);
        const FisherMatrix path_fim = compute_fim(cfg, "path", o.samples, cfg.sim.seed + 3,
                                                  o.threads);
        if (o.mode == "path-inf") {
            bound = path_sens_bound_infinite(std::max(0.0, stats.iat.value), path_fim, v);
        } else {
            const FisherMatrix static_fim = compute_fim(cfg, "static", o.samples,
                                                        cfg.sim.seed + 4, o.threads);
            bound = path_sens_bound_stationary(std::max(0.0, stats.tau_T), path_fim, static_fim,
                                               stats.horizon, v);
        }
    } else {
        throw std::invalid_argument("unknown sens mode (use static|path-T|path-inf)");
    }

    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    csv_row(os, {"observable", "direction", "index_estimate", "index_stderr", "bound", "mode"});
    csv_row(os, {f.name, join_direction(v), csv_float(index.value), csv_float(index.stderr_),
                 csv_float(bound), o.mode});
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

struct ReproduceOpts {
    std::string target, out;
    bool mc = false;
    double k1 = 2.0, k2 = 1.0;
    double alpha = 1.0, beta = 0.0, gamma = 1.0, dt = 0.01;
    int n_paths = 1000;
    double horizon = 50.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct LongTable {
    bool mc = false;
    std::vector<std::array<std::string, 3>> rows; // quantity, mc_value, mc_stderr

    void add(const std::string& q, double value) {
        rows.push_back({q + "," + csv_float(value), "", ""});
    }
    void add_mc(const std::string& q, double value, double mc_value, double mc_err) {
        rows.push_back({q + "," + csv_float(value), csv_float(mc_value), csv_float(mc_err)});
    }
    void write(std::ostream& os) const {
        os << (mc ? "quantity,value,mc_value,mc_stderr\n" : "quantity,value\n");
        for (const auto& r : rows) {
            os << r[0];
            if (mc) os << ',' << r[1] << ',' << r[2];
            os << '\n';
        }
    }
};

int run_reproduce_bd(const ReproduceOpts& o) {
    const BirthDeath bd(o.k1, o.k2);
    const BdReference ref = bd_reference(o.k1, o.k2);
    LongTable table;
    table.mc = o.mc;
    const auto& sfim = ref.stationary_fim;
    const auto& pfim_analytic = ref.path_fim;
    table.add("stationary_fim_11", sfim(0, 0));
    table.add("stationary_fim_12", sfim(0, 1));
    table.add("stationary_fim_22", sfim(1, 1));
    table.add("mean", ref.mean);
    table.add("var_f1", ref.var_f1);
    table.add("var_f2", ref.var_f2);
    for (const auto& row : ref.sensitivities) {
        table.add("si_" + row.observable + "_" + row.parameter, row.index);
        table.add("sb_static_" + row.observable + "_" + row.parameter, row.bound_static);
        table.add("sb_path_" + row.observable + "_" + row.parameter, row.bound_path);
    }

    if (o.mc) {
        SimConfig sim{o.n_paths, o.horizon, 0.0, bd.default_burn_in(), o.seed, o.threads};
        const auto spec = bd.ctmc_spec();
        const PathEnsemble e = ssa(spec, sim);
        const FisherMatrix mc_fim = pfim_ctmc_from_ensemble(spec, e);
        table.add_mc("path_fim_11", pfim_analytic(0, 0), mc_fim.entries(0, 0), mc_fim.stderr_(0, 0));
        table.add_mc("path_fim_12", pfim_analytic(0, 1), mc_fim.entries(0, 1), mc_fim.stderr_(0, 1));
        table.add_mc("path_fim_22", pfim_analytic(1, 1), mc_fim.entries(1, 1), mc_fim.stderr_(1, 1));
        const double grid = 0.1 / o.k2;
        const int max_lag = static_cast<int>(std::ceil(8.0 / (o.k2 * grid)));
        const Observable f1 = Observable::identity();
        const Observable f2 = Observable::second_central(bd.stationary_mean());
        const auto iat1 = iat_infinite(acf_estimate(e, f1, max_lag, grid));
        const auto iat2 = iat_infinite(acf_estimate(e, f2, max_lag, grid));
        table.add_mc("iat_f1", ref.iat_f1, iat1.value, iat1.stderr_);
        table.add_mc("iat_f2", ref.iat_f2, iat2.value, iat2.stderr_);
    } else {
        table.add("path_fim_11", pfim_analytic(0, 0));
        table.add("path_fim_12", pfim_analytic(0, 1));
        table.add("path_fim_22", pfim_analytic(1, 1));
        table.add("iat_f1", ref.iat_f1);
        table.add("iat_f2", ref.iat_f2);
    }

    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    table.write(os);
    return 0;
}

int run_reproduce_ou(const ReproduceOpts& o) {
    const OUModel ou(o.alpha, o.beta, o.gamma);
    const OuReference ref = ou_reference(o.alpha, o.beta, o.gamma, o.dt);
    LongTable table;
    table.mc = o.mc;
    const auto& sdiag = ref.stationary_fim_diag;
    const auto& cdiag = ref.path_fim_cont_diag;
    const auto& ediag = ref.path_fim_euler_diag;
    for (int i = 0; i < 3; ++i) {
        table.add("stationary_fim_" + std::to_string(i + 1) + std::to_string(i + 1), sdiag[static_cast<std::size_t>(i)]);
        table.add("path_fim_cont_" + std::to_string(i + 1) + std::to_string(i + 1), cdiag[static_cast<std::size_t>(i)]);
        table.add("path_fim_euler_" + std::to_string(i + 1) + std::to_string(i + 1), ediag[static_cast<std::size_t>(i)]);
    }
    for (const auto& row : ref.sensitivities) {
        table.add("si_" + row.observable + "_" + row.parameter, row.index);
        table.add("sb_static_" + row.observable + "_" + row.parameter, row.bound_static);
        table.add("sb_path_" + row.observable + "_" + row.parameter, row.bound_path);
    }
    if (o.mc) {
        SimConfig sim{o.n_paths, o.horizon, o.dt, ou.default_burn_in(), o.seed, o.threads};
        const PathEnsemble e = euler_maruyama(ou.sde_spec(), sim);
        const Observable f = Observable::identity();
        std::vector<double> all;
        for (const auto& p : e.paths) {
            const auto s = observable_series(e, p, f, 0.0);
            all.insert(all.end(), s.begin(), s.end());
        }
        const int max_lag = static_cast<int>(std::ceil(8.0 / (o.alpha * o.dt)));
        const auto iat = iat_infinite(acf_estimate(e, f, max_lag));
        table.add_mc("var_x", ref.var_x, variance(all), 0.0);
        table.add_mc("iat_x", ref.iat_x, iat.value, iat.stderr_);
        const FisherMatrix euler_fim =
            pfim_euler(ou.euler_chain(o.dt), o.dt, 100000, o.seed + 1);
        for (int i = 0; i < 3; ++i)
            table.add_mc("path_fim_euler_mc_" + std::to_string(i + 1) + std::to_string(i + 1),
                         ediag[static_cast<std::size_t>(i)], euler_fim.entries(i, i), euler_fim.stderr_(i, i));
    } else {
        table.add("var_x", ref.var_x);
        table.add("iat_x", ref.iat_x);
    }
    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    table.write(os);
    return 0;
}

int run_reproduce_ode_figure(const ReproduceOpts& o) {
    if (o.out.empty()) throw std::invalid_argument("ode-figure requires --out FILE");
    const auto dot = o.out.rfind('.');
    const std::string stem = dot == std::string::npos ? o.out : o.out.substr(0, dot);
    const std::string ext = dot == std::string::npos ? ".csv" : o.out.substr(dot);
    for (const double sigma : {1.0, 2.0}) {
        std::ofstream os =
            open_out(stem + "_sigma" + std::to_string(static_cast<int>(sigma)) + ext);
        csv_row(os, {"t", "S_mu", "bound_mu", "S_sigma", "bound_sigma"});
        for (double t = 0.5; t <= 10.0 + 1e-9; t += 0.25) {
            const LogNormalDecay m(1.0, 1.0, sigma, 10.0, t);
            const auto s = m.sensitivities();
            csv_row(os, {csv_float(t), csv_float(s.s_mu), csv_float(s.bound_mu),
                         csv_float(s.s_sigma), csv_float(s.bound_sigma)});
        }
    }
    return 0;
}

int run_reproduce_expfam(const ReproduceOpts& o) {
    LongTable table;
    table.mc = false;
    struct Case {
        ExpFamily fam;
        std::vector<double> theta;
    };
    std::vector<Case> cases;
    cases.push_back({ExpFamily::gaussian_natural(), {1.0, -0.5}});
    cases.push_back({ExpFamily::poisson_natural(), {std::log(2.0)}});
    for (const auto& c : cases) {
        const auto ref = expfam_reference(c.fam, c.theta);
        for (int k = 0; k < c.fam.dim_theta; ++k)
            for (int l = 0; l < c.fam.dim_theta; ++l) {
                const auto b = expfam_sufficient_bound(ref.fim, k, l);
                const std::string tag =
                    c.fam.name + "_" + std::to_string(k + 1) + std::to_string(l + 1);
                table.add("sens_" + tag, ref.sensitivity(k, l));
                table.add("bound_" + tag, b.bound);
                table.add("equality_" + tag, b.equality ? 1.0 : 0.0);
            }
    }
    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    table.write(os);
    return 0;
}

int run_reproduce(const ReproduceOpts& o) {
    if (o.target == "bd-table") return run_reproduce_bd(o);
    if (o.target == "ou-table") return run_reproduce_ou(o);
    if (o.target == "ode-figure") return run_reproduce_ode_figure(o);
    if (o.target == "expfam") return run_reproduce_expfam(o);
    throw std::invalid_argument("unknown target '" + o.target +
                                "' (use bd-table|ou-table|ode-figure|expfam)");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
    std::string model, out;
    int threads = 1;
};

int run_simulate(const SimulateOpts& o) {
    ModelConfig cfg = load_model_config(o.model);
    apply_seed_override(cfg);
    const PathEnsemble e = simulate_model(cfg, o.threads);
    std::optional<std::ofstream> file;
    std::ostream& os = pick_stream(file, o.out);
    write_ensemble_csv(os, e);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"goal-oriented divergence and Fisher-information sensitivity bounds"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker cap for ensemble generation");

    DivergenceOpts dv;
    auto* c_div = app.add_subcommand("divergence", "goal-oriented weak-error bounds");
    c_div->add_option("--p-samples", dv.p_samples, "sample file (one real per line)");
    c_div->add_option("--rho2", dv.rho2, "relative-entropy budget for the samples route");
    c_div->add_option("--p-dist", dv.p_dist, "nominal distribution file (value,prob)");
    c_div->add_option("--q-dist", dv.q_dist, "alternative distribution file (value,prob)");
    c_div->add_option("--observable", dv.observable, "mean|second_central|indicator_gt:<x>");
    c_div->add_option("--out", dv.out, "output CSV (default stdout)");

    FimOpts fo;
    auto* c_fim = app.add_subcommand("fim", "Fisher information matrix");
    c_fim->add_option("--model", fo.model, "model config JSON")->required();
    c_fim->add_option("--mode", fo.mode, "static|path");
    c_fim->add_option("--samples", fo.samples, "Monte Carlo sample count");
    c_fim->add_option("--seed", fo.seed, "seed override")->each([&](const std::string&) {
        fo.seed_given = true;
    });
    c_fim->add_option("--out", fo.out, "output CSV (default stdout)");

    SensOpts so;
    auto* c_sens = app.add_subcommand("sens", "sensitivity index estimate and bound");
    c_sens->add_option("--model", so.model, "model config JSON")->required();
    c_sens->add_option("--observable", so.observable, "mean|second_central|indicator_gt:<x>");
    c_sens->add_option("--mode", so.mode, "static|path-T|path-inf");
    c_sens->add_option("--direction", so.direction, "parameter direction, comma separated")
        ->required();
    c_sens->add_option("--samples", so.samples, "Monte Carlo sample count");
    c_sens->add_option("--seed", so.seed, "seed override")->each([&](const std::string&) {
        so.seed_given = true;
    });
    c_sens->add_option("--eps", so.eps, "finite-difference step");
    c_sens->add_option("--grid-dt", so.grid_dt, "resampling grid for event paths");
    c_sens->add_option("--out", so.out, "output CSV (default stdout)");

    ReproduceOpts ro;
    auto* c_rep = app.add_subcommand("reproduce", "analytic reference tables and figure data");
    c_rep->add_option("--target", ro.target, "bd-table|ou-table|ode-figure|expfam")->required();
    c_rep->add_option("--out", ro.out, "output CSV (default stdout)");
    c_rep->add_flag("--mc", ro.mc, "add Monte Carlo columns");
    c_rep->add_option("--k1", ro.k1, "birth rate");
    c_rep->add_option("--k2", ro.k2, "death rate");
    c_rep->add_option("--alpha", ro.alpha, "OU relaxation rate");
    c_rep->add_option("--beta", ro.beta, "OU mean");
    c_rep->add_option("--gamma", ro.gamma, "OU noise amplitude");
    c_rep->add_option("--dt", ro.dt, "Euler step");
    c_rep->add_option("--n-paths", ro.n_paths, "Monte Carlo path count");
    c_rep->add_option("--horizon", ro.horizon, "Monte Carlo horizon");
    c_rep->add_option("--seed", ro.seed, "Monte Carlo seed");

    SimulateOpts mo;
    auto* c_sim = app.add_subcommand("simulate", "write a trajectory ensemble as CSV");
    c_sim->add_option("--model", mo.model, "model config JSON")->required();
    c_sim->add_option("--out", mo.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (const char* env = std::getenv("UQSA_SEED")) {
            ro.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
        }
        fo.threads = so.threads = ro.threads = mo.threads = threads;
        if (c_div->parsed()) return run_divergence(dv);
        if (c_fim->parsed()) return run_fim(fo);
        if (c_sens->parsed()) return run_sens(so);
        if (c_rep->parsed()) return run_reproduce(ro);
        if (c_sim->parsed()) return run_simulate(mo);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
