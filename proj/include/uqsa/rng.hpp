#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>
#include <functional>
#include <cmath>

namespace uqsa {

/// SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded random stream. Stream `i` of master seed `s` is a std::mt19937_64
/// initialized with mix64(s ^ mix64(i + 1)); this rule is the reproducibility
/// contract: ensembles depend only on (master seed, stream index), never on
/// thread scheduling. All variates are generated from 53-bit uniforms through
/// fixed transforms (Box-Muller, inversion), so streams are bit-stable.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : gen_(mix64(master_seed ^ mix64(stream_id + 1))) {}

    explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform on (0, 1]; never returns 0 so log(u) is always finite.
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
    }

    /// Standard normal via Box-Muller; the spare variate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        return -std::log(uniform()) / rate;
    }

    /// Index i with probability probs[i]/sum(probs). CDF inversion.
    int categorical(std::span<const double> probs) {
        double total = 0.0;
        for (double p : probs) total += p;
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u <= acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    /// Poisson by CDF inversion; coupled to a single uniform, which keeps
    /// common-random-number comparisons across nearby means meaningful.
    int poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u > cdf && k < 100000000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Runs fn(i, stream_i) for i in [0, n) on up to `threads` workers.
/// Work is partitioned by index and each index owns its derived stream,
/// so results do not depend on the number of workers.
inline void for_each_stream(std::uint64_t master_seed, int n, int threads,
                            const std::function<void(int, RngStream&)>& fn) {
    if (n <= 0) return;
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) {
            RngStream s(master_seed, static_cast<std::uint64_t>(i));
            fn(i, s);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) {
                RngStream s(master_seed, static_cast<std::uint64_t>(i));
                fn(i, s);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace uqsa
