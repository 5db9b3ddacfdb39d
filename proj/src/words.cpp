#include "umc/words.hpp"

#include <limits>
#include <stdexcept>

namespace umc {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base)
            throw std::overflow_error("checked_pow: overflow");
        result *= base;
    }
    return result;
}

std::uint64_t pack_word(std::span<const Symbol> word, int base) {
    std::uint64_t packed = 0;
    for (Symbol s : word) {
        if (s < 0 || s >= base)
            throw std::invalid_argument("pack_word: symbol out of alphabet");
        packed = packed * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(s);
    }
    return packed;
}

void unpack_word(std::uint64_t packed, int base, int len, std::span<Symbol> out) {
    for (int i = len - 1; i >= 0; --i) {
        out[i] = static_cast<Symbol>(packed % base);
        packed /= base;
    }
    if (packed != 0)
        throw std::invalid_argument("unpack_word: value out of range for word length");
}

std::vector<Symbol> unpacked_word(std::uint64_t packed, int base, int len) {
    std::vector<Symbol> out(len);
    unpack_word(packed, base, len, out);
    return out;
}

} // namespace umc
