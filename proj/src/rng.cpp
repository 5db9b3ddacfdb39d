#include "umc/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace umc {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t k) {
    return splitmix64(master + k * kGamma);
}

Symbol Rng::sample_pmf(std::span<const double> pmf) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        if (u < acc) return static_cast<Symbol>(i);
    }
    // u landed in the rounding gap past the last positive mass
    for (std::size_t i = pmf.size(); i-- > 0;)
        if (pmf[i] > 0.0) return static_cast<Symbol>(i);
    throw std::invalid_argument("sample_pmf: all-zero pmf");
}

Symbol Rng::sample_cdf(std::span<const double> cdf) {
    double u = uniform01();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<Symbol>(it - cdf.begin());
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    // rejection sampling keeps the draw unbiased and engine-exact
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = eng_();
    } while (v >= limit);
    return v % bound;
}

} // namespace umc
