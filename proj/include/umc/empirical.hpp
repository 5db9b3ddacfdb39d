#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "umc/words.hpp"

namespace umc {

// Block-type of a sequence: integer counts over packed length-l words plus
// the denominator. Counts stay exact integers; the pmf is materialized on
// demand so identities on counts can be checked with zero tolerance.
struct EmpiricalDistribution {
    int l = 1;
    int shift = 0;               // block offset; kOverlapping for sliding windows
    std::uint64_t total = 0;     // number of counted blocks/windows
    std::vector<std::int64_t> counts;  // size alphabet^l

    static constexpr int kOverlapping = -1;

    std::vector<double> pmf() const;
};

std::ostream& operator<<(std::ostream& os, const EmpiricalDistribution& d);

// Type over the disjoint length-l blocks of x^n starting at offset s:
// positions [s + i*l, s + (i+1)*l) for 0 <= i < floor((n-s)/l).
EmpiricalDistribution nonoverlapping_empirical(std::span<const Symbol> x, int alphabet,
                                               int l, int s);

// Type over all n-l+1 sliding windows of length l.
EmpiricalDistribution overlapping_empirical(std::span<const Symbol> x, int alphabet, int l);

// sum_a pmf(a) * values[a].
double weighted_block_average(const EmpiricalDistribution& dist,
                              std::span<const double> values);

} // namespace umc
