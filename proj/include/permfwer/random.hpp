#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace permfwer {

/// SplitMix64 finalizer; used to derive stream keys from (seed, path...).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed for index `child` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) noexcept {
    return mix64(mix64(seed) ^ mix64(child + 0x632be59bd9b4e019ULL));
}

// Stream domains keep independent consumers of the same (seed, index) apart.
enum class StreamDomain : std::uint64_t {
    Permutation = 1,
    Bootstrap = 2,
    Genotype = 3,
    MinorAlleleFrequency = 4,
    Covariate = 5,
    Phenotype = 6,
    MvnDraw = 7,
    QuantileBootstrap = 8,
};

/// Counter-based generator (Philox4x32-10). The key fixes the stream and the
/// counter walks through it, so any (seed, path) stream can be reconstructed
/// without carrying state between workers.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1].
    double uniform_pos();

    /// Standard normal variate (Box-Muller on two uniforms; second value cached).
    double normal();

    /// Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Uniform random permutation of {0..n-1} by Fisher-Yates.
std::vector<int> random_permutation(int n, RandomStream& rng);

}  // namespace permfwer
