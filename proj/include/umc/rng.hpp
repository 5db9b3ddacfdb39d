#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "umc/words.hpp"

namespace umc {

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// k-th derived seed of a master seed: splitmix64 evaluated at the k-th state
// of the gamma sequence. O(1) random access, so derived streams are
// reproducible and independent of the order workers pick them up.
std::uint64_t derived_seed(std::uint64_t master, std::uint64_t k);

// mt19937_64 with pinned sampling helpers. The std:: distributions are
// implementation-defined, which would make recorded runs platform-dependent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1p-53;
    }

    // Index sampled from a pmf (linear CDF walk; meant for short rows).
    Symbol sample_pmf(std::span<const double> pmf);

    // Index sampled from a precomputed inclusive CDF (binary search).
    Symbol sample_cdf(std::span<const double> cdf);

    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace umc
