#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace umc {

using Symbol = std::int32_t;

// base^exp over uint64, throwing std::overflow_error on wrap.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp);

// Fixed-length words over a finite alphabet are keyed by their packed radix
// value. The first symbol is the most significant digit, so packed order
// equals lexicographic order.
std::uint64_t pack_word(std::span<const Symbol> word, int base);

void unpack_word(std::uint64_t packed, int base, int len, std::span<Symbol> out);

std::vector<Symbol> unpacked_word(std::uint64_t packed, int base, int len);

} // namespace umc
