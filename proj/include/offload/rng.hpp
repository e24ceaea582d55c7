#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace offload {

// Seed-stream derivation. Distinct labels yield statistically independent
// sub-streams from one master seed, so concurrent runs never share state.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_label(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) { return mix_seed(mix_seed(a, b), c); }

inline uint64_t mix_seed(uint64_t a, uint64_t b, std::string_view label) {
    return mix_seed(mix_seed(a, b), hash_label(label));
}

// Deterministic generator with explicit distributions. The standard library's
// distribution objects are implementation-defined, so every draw here is spelled
// out to keep outputs reproducible byte for byte.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

    uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n)
    uint64_t uniform_int(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Box-Muller without spare caching: draw count per call is fixed.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
        return mean + stddev * z;
    }

    // Rejection sampling from the untruncated normal; bounds within ~1 sigma of
    // the mean keep the acceptance rate high. stddev == 0 degenerates to the
    // mean clamped into the interval.
    double truncated_normal(double mean, double stddev, double lo, double hi) {
        if (stddev <= 0.0) return std::min(std::max(mean, lo), hi);
        for (int i = 0; i < 100000; ++i) {
            const double x = normal(mean, stddev);
            if (x >= lo && x <= hi) return x;
        }
        return std::min(std::max(mean, lo), hi);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace offload
