#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace droso {

// Deterministic random stream. The engine (mt19937_64) is bit-specified by
// the standard; the std distributions are not, so the mappings to doubles,
// bounded ints and gaussians are done by hand here. Identical seeds give
// identical sequences on every platform and standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), rejection-sampled for exact uniformity
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // standard normal via Box-Muller (one value per call; the pair's second
    // half is discarded to keep the stream layout simple)
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Fisher-Yates shuffle
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer, used as a stable seed mixer
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stable hash of a seed plus up to three stream coordinates. Used to pin
// per-unit and per-epoch seeds independently of scheduling.
inline uint64_t derive_seed(uint64_t base, uint64_t a) {
    return mix64(mix64(base) ^ mix64(a ^ 0xA076'1D64'78BD'642Full));
}

inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
    return derive_seed(derive_seed(base, a), b ^ 0xE703'7ED1'A0B4'28DBull);
}

inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
    return derive_seed(derive_seed(base, a, b), c ^ 0x8EBC'6AF0'9C88'C6E3ull);
}

}  // namespace droso
