#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace umc {

// Raised when a read runs past the end of a stream.
struct TruncatedBitstream : std::runtime_error {
    explicit TruncatedBitstream(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a parsed header field does not match the shared catalog/config
// (bad block length, bad code index, bad offset).
struct IndexOutOfCatalog : std::runtime_error {
    explicit IndexOutOfCatalog(const std::string& what) : std::runtime_error(what) {}
};

// Bit vector with MSB-first packing: bit i lives at byte i/8, position 7-i%8.
// Fields are appended most significant bit first.
class Bitstream {
public:
    void push_bit(int b);
    void push_bits(std::uint64_t value, int width);

    int bit(std::uint64_t i) const {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
    }
    std::uint64_t size_bits() const { return nbits_; }
    std::span<const std::uint8_t> bytes() const { return bytes_; }

    // Truncate to the first `nbits` bits.
    void resize_bits(std::uint64_t nbits);

    bool operator==(const Bitstream&) const = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t nbits_ = 0;
};

class BitReader {
public:
    explicit BitReader(const Bitstream& bits) : bits_(bits) {}

    int read_bit();
    std::uint64_t read_bits(int width);
    std::uint64_t position() const { return pos_; }

private:
    const Bitstream& bits_;
    std::uint64_t pos_ = 0;
};

// Minimal unsigned big integer (little-endian 64-bit limbs). Just enough for
// exact radix packing: Horner accumulation, small divmod, powers, bit access.
class BigUInt {
public:
    BigUInt() = default;
    explicit BigUInt(std::uint64_t v);

    void mul_add_small(std::uint64_t mul, std::uint64_t add);  // this = this*mul + add
    std::uint64_t divmod_small(std::uint64_t div);             // this /= div, returns remainder
    void decrement();                                          // this -= 1 (this > 0)
    BigUInt times(const BigUInt& other) const;
    static BigUInt pow(std::uint64_t base, std::uint64_t exp);

    std::uint64_t bit_length() const;
    bool bit(std::uint64_t i) const;
    void set_bit(std::uint64_t i);
    bool is_zero() const { return limbs_.empty(); }

    bool operator==(const BigUInt&) const = default;

private:
    void trim();
    std::vector<std::uint64_t> limbs_;
};

// Exact ceil(B * log2 M): the bit length of M^B - 1. Zero when M == 1 or B == 0.
std::uint64_t payload_bit_count(std::uint64_t M, std::uint64_t B);

// Appends the block indices as one radix-M integer, first digit most
// significant, in exactly payload_bit_count(M, digits.size()) bits. A naive
// per-block ceil(log2 M) would waste up to one bit per block for non-power-
// of-two M, which matters at small block lengths.
void pack_radix(std::span<const std::uint32_t> digits, std::uint64_t M, Bitstream& out);

std::vector<std::uint32_t> unpack_radix(BitReader& reader, std::uint64_t M, std::uint64_t count);

// File container: magic "UMCB", u32 version, u64 source length n, u64 bit
// count, then the packed bytes.
void write_bitstream_file(const std::filesystem::path& path, std::uint64_t n,
                          const Bitstream& bits);
std::pair<std::uint64_t, Bitstream> read_bitstream_file(const std::filesystem::path& path);

} // namespace umc
