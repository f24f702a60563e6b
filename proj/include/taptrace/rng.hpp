#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>

namespace taptrace {

// splitmix64 finalizer, used to turn (seed, stream) pairs into engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
}

/// Seeded generator with fully specified output. The engine (mt19937_64) and
/// every distribution below are pinned by this code, not by the standard
/// library, so equal seeds give equal sequences on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent sub-generator; distinct streams have disjoint draw
    /// sequences (used e.g. for one stream per keyboard popup).
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(derive_seed(seed, stream));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi], both inclusive. Consumes exactly one
    /// engine draw (multiply-shift reduction; bias is O(range / 2^64)).
    std::size_t uniform_index(std::size_t lo, std::size_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(next()) * range;
        return lo + static_cast<std::size_t>(wide >> 64);
    }

    /// Uniform double in [a, b). One engine draw, 53-bit resolution.
    double uniform(double a, double b) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return a + u * (b - a);
    }

    bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

    /// Gaussian via Box-Muller. Consumes exactly two engine draws.
    double normal(double mean, double sigma) {
        const double u1 =
            (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// Anything that can hand out uniform indices in [lo, hi]; satisfied by Rng
/// and by scripted draw sources in tests.
template <typename R>
concept IndexSource = requires(R& r, std::size_t lo, std::size_t hi) {
    { r.uniform_index(lo, hi) } -> std::convertible_to<std::size_t>;
};

}  // namespace taptrace
