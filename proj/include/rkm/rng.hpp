#ifndef RKM_RNG_HPP
#define RKM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rkm {

/**
 * SplitMix64 used as a counter-based generator: the i-th output is
 * mix(key + (i + 1) * golden_gamma). Streams are fully determined by the key,
 * so values are identical across platforms and standard libraries.
 *
 * Distribution transforms (uniform, normal, integer) are implemented here
 * rather than with <random> distributions, whose output is implementation
 * defined.
 */
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

    explicit SplitMix64(std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        ++counter_;
        return mix(key_ + counter_ * golden_gamma);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_zero() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) by Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal() {
        const double u1 = uniform_open_zero();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Derives an independent stream key from a base seed and a path of indices,
/// e.g. derive_seed(seed, {restart}) or derive_seed(seed, {n_index, rep}).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = SplitMix64::mix(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t index : path) {
        h = SplitMix64::mix(h + SplitMix64::golden_gamma * (index + 1));
    }
    return h;
}

} // namespace rkm

#endif
