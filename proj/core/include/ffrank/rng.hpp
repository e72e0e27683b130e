#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ffrank {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used for seed derivation so that every stream
// (per trial, per attempt, per sample) is a pure function of the user seed.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a named stream seed: seed x tag x counter -> 64-bit value.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t counter = 0) noexcept {
    return splitmix64(seed ^ splitmix64(tag ^ splitmix64(counter)));
}

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

// Minimal counter-based generator for per-sample splitting in Monte Carlo
// loops where constructing a mt19937_64 per sample would dominate.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t s) noexcept : state_(s) {}
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Unbiased integer in [0, n). Multiply-shift with rejection.
template <class G>
std::uint64_t bounded_uniform(G& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        const auto wide = static_cast<unsigned __int128>(r) * n;
        if (static_cast<std::uint64_t>(wide) >= threshold)
            return static_cast<std::uint64_t>(wide >> 64);
    }
}

// Uniform double in [0, 1) with 53 random bits.
template <class G>
double uniform_unit(G& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates shuffle with our own bounded sampler, so shuffles are
// reproducible independent of standard library internals.
template <class T, class G>
void shuffle_vector(std::vector<T>& v, G& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_uniform(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace ffrank
