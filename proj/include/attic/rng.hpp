#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace attic {

inline constexpr uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic random stream. All draws go through explicit uint64 -> double
// conversions so results depend only on the mt19937_64 engine state, not on
// implementation-defined std::*_distribution internals.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : engine_(splitmix64(seed)) {}

    // Independent substream, stable across runs for the same (seed, stream).
    static RandomStream substream(uint64_t seed, uint64_t stream) {
        return RandomStream(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 1));
    }

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double low, double high) { return low + (high - low) * uniform01(); }

    // Box-Muller; one fresh pair of uniforms per draw.
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Index in [0, n) proportional to weights[i]; weights need not be normalized.
    template <typename Weights>
    int categorical(const Weights& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        double acc = 0.0;
        int n = static_cast<int>(weights.size());
        for (int i = 0; i < n; ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace attic
