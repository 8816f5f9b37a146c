#pragma once

// Seeded, reproducible randomness. Every stochastic routine takes an Rng&
// explicitly; per-trial generators are derived from (master seed, trial index)
// in counter mode, so results never depend on execution order or on how many
// draws earlier trials consumed.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace bqs {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    // Independent child generator for trial `index` (counter-mode derivation).
    Rng derive(std::uint64_t index) const {
        return Rng(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
    }

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution. Not std::uniform_real_distribution:
    // that one is implementation-defined and would break cross-platform replay.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    int bit() { return static_cast<int>(next() & 1ULL); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    double gaussian() {
        double u1 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace bqs
