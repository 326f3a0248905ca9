#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "uqsa/markov.hpp"
#include "uqsa/math.hpp"
#include "uqsa/observable.hpp"
#include "uqsa/rng.hpp"

namespace uqsa {

struct SimConfig {
    int n_paths = 1;
    double horizon = 1.0; // time units; steps for discrete-time chains
    double dt = 0.0;      // integrator step (SDE / discretized chains)
    double burn_in = 0.0;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate(bool needs_dt) const {
        if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be >= 1");
        if (!(horizon > 0.0)) throw std::invalid_argument("SimConfig: horizon must be > 0");
        if (needs_dt && !(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
        if (burn_in < 0.0) throw std::invalid_argument("SimConfig: burn_in must be >= 0");
    }
};

struct Path {
    std::vector<double> t; // event timestamps (empty for strided paths)
    std::vector<double> x; // states, flattened by dim
};

/// Seeded ensemble of trajectories. Strided paths share the stride `dt`
/// and start at t = 0 after burn-in; event paths carry explicit, strictly
/// increasing timestamps. Path i is generated from stream i of `seed`, so
/// the ensemble is fully determined by (seed, n_paths) for any worker count.
struct PathEnsemble {
    enum class Kind { strided, events };
    Kind kind = Kind::strided;
    int dim = 1;
    double dt = 0.0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> theta;
    std::vector<Path> paths;

    int n_paths() const { return static_cast<int>(paths.size()); }

    void validate_timestamps() const {
        for (const auto& p : paths)
            for (std::size_t i = 1; i < p.t.size(); ++i)
                if (!(p.t[i] > p.t[i - 1]))
                    throw std::runtime_error("PathEnsemble: timestamps not strictly increasing");
    }
};

/// Steps a finite-state chain; horizon is the step count. States are stored
/// as indices. Deterministic in (cfg.seed, path index).
inline PathEnsemble simulate_dtmc(const FiniteDtmc& chain, const SimConfig& cfg) {
    chain.validate();
    cfg.validate(false);
    const int steps = static_cast<int>(std::llround(cfg.horizon));
    const int burn = static_cast<int>(std::llround(cfg.burn_in));
    if (steps < 1) throw std::invalid_argument("simulate_dtmc: horizon under one step");

    PathEnsemble e;
    e.kind = PathEnsemble::Kind::strided;
    e.dim = 1;
    e.dt = 1.0;
    e.horizon = steps;
    e.seed = cfg.seed;
    e.paths.resize(static_cast<std::size_t>(cfg.n_paths));
    const std::vector<double> init =
        chain.initial.empty() ? std::vector<double>(static_cast<std::size_t>(chain.n_states),
                                                    1.0 / chain.n_states)
                              : chain.initial;
    for_each_stream(cfg.seed, cfg.n_paths, cfg.threads, [&](int i, RngStream& rng) {
        int state = rng.categorical(init);
        for (int s = 0; s < burn; ++s) state = rng.categorical(chain.row(state));
        auto& p = e.paths[static_cast<std::size_t>(i)];
        p.x.resize(static_cast<std::size_t>(steps) + 1);
        p.x[0] = state;
        for (int s = 1; s <= steps; ++s) {
            state = rng.categorical(chain.row(state));
            p.x[static_cast<std::size_t>(s)] = state;
        }
    });
    return e;
}

/// Gillespie stochastic simulation: exponential holding times with rate
/// lambda(x) = sum_x' c(x,x'), categorical jumps with weights c(x,.).
/// Paths are (time, state) event lists starting at t = 0 post burn-in;
/// absorbing states simply stop producing events.
inline PathEnsemble ssa(const CtmcSpec& spec, const SimConfig& cfg) {
    spec.validate();
    cfg.validate(false);
    PathEnsemble e;
    e.kind = PathEnsemble::Kind::events;
    e.dim = 1;
    e.horizon = cfg.horizon;
    e.seed = cfg.seed;
    e.paths.resize(static_cast<std::size_t>(cfg.n_paths));
    const int n = spec.n_states;
    for_each_stream(cfg.seed, cfg.n_paths, cfg.threads, [&](int i, RngStream& rng) {
        int state = spec.stationary.empty() ? spec.initial_state
                                            : rng.categorical(spec.stationary);
        double t = -cfg.burn_in;
        auto& p = e.paths[static_cast<std::size_t>(i)];
        while (true) {
            const double lam = spec.exit_rate(state);
            if (lam > 1e12) throw std::runtime_error("ssa: rate blow-up");
            if (!(lam > 0.0)) break; // absorbing
            const double hold = rng.exponential(lam);
            const double t_next = t + hold;
            const int next = rng.categorical(
                std::span<const double>(spec.rates.data() + static_cast<std::size_t>(state) * n,
                                        static_cast<std::size_t>(n)));
            if (t_next >= cfg.horizon) break;
            t = t_next;
            if (t >= 0.0) {
                if (p.t.empty()) { // entry state of the retained window
                    p.t.push_back(0.0);
                    p.x.push_back(state);
                }
                p.t.push_back(t);
                p.x.push_back(next);
            }
            state = next;
        }
        if (p.t.empty()) {
            p.t.push_back(0.0);
            p.x.push_back(state);
        }
    });
    e.validate_timestamps();
    return e;
}

/// Euler-Maruyama integration X_{n+1} = X_n + a(X_n) dt + sigma(X_n) sqrt(dt) xi.
/// Strided output after discarding floor(burn_in / dt) steps.
inline PathEnsemble euler_maruyama(const SdeSpec& spec, const SimConfig& cfg) {
    cfg.validate(true);
    if (!spec.drift || !spec.diffusion)
        throw std::invalid_argument("euler_maruyama: drift/diffusion not set");
    const int d = spec.dim;
    const int steps = static_cast<int>(std::llround(cfg.horizon / cfg.dt));
    const int burn = static_cast<int>(std::floor(cfg.burn_in / cfg.dt + 0.5));
    if (steps < 1) throw std::invalid_argument("euler_maruyama: horizon under one step");

    PathEnsemble e;
    e.kind = PathEnsemble::Kind::strided;
    e.dim = d;
    e.dt = cfg.dt;
    e.horizon = steps * cfg.dt;
    e.seed = cfg.seed;
    e.paths.resize(static_cast<std::size_t>(cfg.n_paths));
    const double root_dt = std::sqrt(cfg.dt);
    for_each_stream(cfg.seed, cfg.n_paths, cfg.threads, [&](int i, RngStream& rng) {
        std::vector<double> x = spec.sample_stationary ? spec.sample_stationary(rng) : spec.x0;
        if (static_cast<int>(x.size()) != d)
            throw std::invalid_argument("euler_maruyama: initial state dimension mismatch");
        std::vector<double> a(static_cast<std::size_t>(d));
        std::vector<double> sig(static_cast<std::size_t>(d) * d);
        std::vector<double> xi(static_cast<std::size_t>(d));
        auto& p = e.paths[static_cast<std::size_t>(i)];
        p.x.resize((static_cast<std::size_t>(steps) + 1) * d);
        auto step = [&](std::vector<double>& state) {
            spec.drift(state, a);
            spec.diffusion(state, sig);
            for (int r = 0; r < d; ++r) xi[static_cast<std::size_t>(r)] = rng.normal();
            for (int r = 0; r < d; ++r) {
                double noise = 0.0;
                for (int c = 0; c < d; ++c)
                    noise += sig[static_cast<std::size_t>(r) * d + c] * xi[static_cast<std::size_t>(c)];
                state[static_cast<std::size_t>(r)] += a[static_cast<std::size_t>(r)] * cfg.dt + root_dt * noise;
                if (!std::isfinite(state[static_cast<std::size_t>(r)]))
                    throw std::runtime_error("euler_maruyama: trajectory diverged");
            }
        };
        for (int s = 0; s < burn; ++s) step(x);
        std::copy(x.begin(), x.end(), p.x.begin());
        for (int s = 1; s <= steps; ++s) {
            step(x);
            std::copy(x.begin(), x.end(), p.x.begin() + static_cast<std::size_t>(s) * d);
        }
    });
    return e;
}

/// Evaluates f on the first coordinate of each stored point of one path,
/// resampling event paths onto a uniform grid (piecewise-constant states).
inline std::vector<double> observable_series(const PathEnsemble& e, const Path& p,
                                             const Observable& f, double grid_dt) {
    std::vector<double> s;
    if (e.kind == PathEnsemble::Kind::strided) {
        const std::size_t len = p.x.size() / static_cast<std::size_t>(e.dim);
        s.resize(len);
        for (std::size_t i = 0; i < len; ++i) s[i] = f(p.x[i * static_cast<std::size_t>(e.dim)]);
        return s;
    }
    if (!(grid_dt > 0.0))
        throw std::invalid_argument("observable_series: event paths need grid_dt > 0");
    const std::size_t len = static_cast<std::size_t>(std::floor(e.horizon / grid_dt)) + 1;
    s.resize(len);
    std::size_t j = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) * grid_dt;
        while (j + 1 < p.t.size() && p.t[j + 1] <= t) ++j;
        s[i] = f(p.x[j]);
    }
    return s;
}

/// Stationary autocovariance series estimated per lag. Pooled across paths:
/// the global mean is shared, per-path autocovariances are averaged and their
/// cross-path spread gives the standard error. Lag 0 is the sample variance.
struct AcfSeries {
    double dt = 1.0; // lag spacing in time units
    double mean = 0.0;
    std::vector<double> acf;
    std::vector<double> stderr_;
    bool mean_drift_warning = false;
};

inline AcfSeries acf_estimate(const PathEnsemble& e, const Observable& f, int max_lag,
                              double grid_dt = 0.0) {
    if (e.paths.empty()) throw std::invalid_argument("acf_estimate: empty ensemble");
    if (max_lag < 0) throw std::invalid_argument("acf_estimate: negative max_lag");
    std::vector<std::vector<double>> series;
    series.reserve(e.paths.size());
    for (const auto& p : e.paths) series.push_back(observable_series(e, p, f, grid_dt));
    const std::size_t len = series.front().size();
    for (const auto& s : series)
        if (s.size() != len) throw std::runtime_error("acf_estimate: ragged series");
    if (static_cast<std::size_t>(max_lag) >= len)
        throw std::invalid_argument("acf_estimate: max_lag exceeds segment length");

    double pooled = 0.0;
    for (const auto& s : series)
        for (double v : s) pooled += v;
    pooled /= static_cast<double>(series.size() * len);

    // stationarity check: first-half vs second-half pooled means
    double m1 = 0.0, m2 = 0.0;
    const std::size_t half = len / 2;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < half; ++i) m1 += s[i];
        for (std::size_t i = half; i < len; ++i) m2 += s[i];
    }
    m1 /= static_cast<double>(series.size() * half);
    m2 /= static_cast<double>(series.size() * (len - half));

    AcfSeries out;
    out.dt = (e.kind == PathEnsemble::Kind::strided) ? (e.dt > 0.0 ? e.dt : 1.0) : grid_dt;
    out.mean = pooled;
    out.acf.resize(static_cast<std::size_t>(max_lag) + 1);
    out.stderr_.resize(static_cast<std::size_t>(max_lag) + 1);
    std::vector<double> per_path(series.size());
    for (int k = 0; k <= max_lag; ++k) {
        for (std::size_t p = 0; p < series.size(); ++p) {
            const auto& s = series[p];
            double acc = 0.0;
            for (std::size_t i = 0; i + static_cast<std::size_t>(k) < len; ++i)
                acc += (s[i] - pooled) * (s[i + static_cast<std::size_t>(k)] - pooled);
            per_path[p] = acc / static_cast<double>(len - static_cast<std::size_t>(k));
        }
        const auto ms = mean_with_stderr(per_path);
        out.acf[static_cast<std::size_t>(k)] = ms.value;
        out.stderr_[static_cast<std::size_t>(k)] = ms.stderr_;
    }

    // flag mean drift beyond 4 combined standard errors
    std::vector<double> path_means(series.size());
    for (std::size_t p = 0; p < series.size(); ++p) path_means[p] = mean(series[p]);
    const double sem = stderr_of_mean(path_means);
    if (series.size() > 1 && std::isfinite(sem))
        out.mean_drift_warning = std::abs(m2 - m1) > 4.0 * std::max(sem, 1e-300) * 2.0;
    return out;
}

} // namespace uqsa
