#include "umc/bitstream.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace umc {

void Bitstream::push_bit(int b) {
    if ((nbits_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - (nbits_ & 7)));
    ++nbits_;
}

void Bitstream::push_bits(std::uint64_t value, int width) {
    if (width < 0 || width > 64)
        throw std::invalid_argument("push_bits: width out of range");
    if (width < 64 && (value >> width) != 0)
        throw std::invalid_argument("push_bits: value does not fit the field");
    for (int i = width - 1; i >= 0; --i)
        push_bit(static_cast<int>((value >> i) & 1));
}

void Bitstream::resize_bits(std::uint64_t nbits) {
    if (nbits > nbits_) throw std::invalid_argument("resize_bits: can only shrink");
    nbits_ = nbits;
    bytes_.resize((nbits + 7) / 8);
    if (nbits & 7) bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - (nbits & 7)));
}

int BitReader::read_bit() {
    if (pos_ >= bits_.size_bits())
        throw TruncatedBitstream("bitstream ends after " + std::to_string(bits_.size_bits()) +
                                 " bits; read past position " + std::to_string(pos_));
    return bits_.bit(pos_++);
}

std::uint64_t BitReader::read_bits(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(read_bit());
    return v;
}

BigUInt::BigUInt(std::uint64_t v) {
    if (v != 0) limbs_.push_back(v);
}

void BigUInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

void BigUInt::mul_add_small(std::uint64_t mul, std::uint64_t add) {
    unsigned __int128 carry = add;
    for (auto& limb : limbs_) {
        unsigned __int128 cur = static_cast<unsigned __int128>(limb) * mul + carry;
        limb = static_cast<std::uint64_t>(cur);
        carry = cur >> 64;
    }
    while (carry != 0) {
        limbs_.push_back(static_cast<std::uint64_t>(carry));
        carry >>= 64;
    }
    trim();
}

std::uint64_t BigUInt::divmod_small(std::uint64_t div) {
    if (div == 0) throw std::invalid_argument("BigUInt: division by zero");
    unsigned __int128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        unsigned __int128 cur = (rem << 64) | limbs_[i];
        limbs_[i] = static_cast<std::uint64_t>(cur / div);
        rem = cur % div;
    }
    trim();
    return static_cast<std::uint64_t>(rem);
}

void BigUInt::decrement() {
    if (is_zero()) throw std::logic_error("BigUInt: decrement of zero");
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        if (limbs_[i]-- != 0) break;  // no borrow once a limb was nonzero
    }
    trim();
}

BigUInt BigUInt::times(const BigUInt& other) const {
    BigUInt out;
    if (is_zero() || other.is_zero()) return out;
    out.limbs_.assign(limbs_.size() + other.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t k = 0; k < other.limbs_.size(); ++k) {
            unsigned __int128 cur = static_cast<unsigned __int128>(limbs_[i]) * other.limbs_[k] +
                                    out.limbs_[i + k] + carry;
            out.limbs_[i + k] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        std::size_t pos = i + other.limbs_.size();
        while (carry != 0) {
            unsigned __int128 cur = carry + out.limbs_[pos];
            out.limbs_[pos] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
            ++pos;
        }
    }
    out.trim();
    return out;
}

BigUInt BigUInt::pow(std::uint64_t base, std::uint64_t exp) {
    BigUInt result(1);
    BigUInt b(base);
    while (exp != 0) {
        if (exp & 1) result = result.times(b);
        exp >>= 1;
        if (exp != 0) b = b.times(b);
    }
    return result;
}

std::uint64_t BigUInt::bit_length() const {
    if (limbs_.empty()) return 0;
    return (limbs_.size() - 1) * 64 +
           static_cast<std::uint64_t>(std::bit_width(limbs_.back()));
}

bool BigUInt::bit(std::uint64_t i) const {
    std::size_t limb = i >> 6;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i & 63)) & 1;
}

void BigUInt::set_bit(std::uint64_t i) {
    std::size_t limb = i >> 6;
    if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
    limbs_[limb] |= std::uint64_t{1} << (i & 63);
}

std::uint64_t payload_bit_count(std::uint64_t M, std::uint64_t B) {
    if (M == 0) throw std::invalid_argument("payload_bit_count: M must be positive");
    if (M == 1 || B == 0) return 0;
    if (std::has_single_bit(M))
        return B * static_cast<std::uint64_t>(std::countr_zero(M));
    BigUInt cap = BigUInt::pow(M, B);
    cap.decrement();
    return cap.bit_length();  // bitlen(M^B - 1) == ceil(B log2 M) for non-power-of-two M
}

void pack_radix(std::span<const std::uint32_t> digits, std::uint64_t M, Bitstream& out) {
    const std::uint64_t width = payload_bit_count(M, digits.size());
    if (width == 0) return;
    if (std::has_single_bit(M)) {
        const int per = std::countr_zero(M);
        for (std::uint32_t d : digits) out.push_bits(d, per);
        return;
    }
    BigUInt value;
    for (std::uint32_t d : digits) {
        if (d >= M) throw std::invalid_argument("pack_radix: digit out of range");
        value.mul_add_small(M, d);
    }
    for (std::uint64_t i = width; i-- > 0;)
        out.push_bit(value.bit(i) ? 1 : 0);
}

std::vector<std::uint32_t> unpack_radix(BitReader& reader, std::uint64_t M, std::uint64_t count) {
    std::vector<std::uint32_t> digits(count, 0);
    if (M == 1 || count == 0) return digits;
    if (std::has_single_bit(M)) {
        const int per = std::countr_zero(M);
        for (std::uint64_t i = 0; i < count; ++i)
            digits[i] = static_cast<std::uint32_t>(reader.read_bits(per));
        return digits;
    }
    const std::uint64_t width = payload_bit_count(M, count);
    BigUInt value;
    for (std::uint64_t i = 0; i < width; ++i) {
        int b = reader.read_bit();
        if (b) value.set_bit(width - 1 - i);
    }
    for (std::uint64_t i = count; i-- > 0;)
        digits[i] = static_cast<std::uint32_t>(value.divmod_small(M));
    return digits;
}

namespace {
constexpr char kMagic[4] = {'U', 'M', 'C', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& os, T v) {
    std::uint8_t buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    std::uint8_t buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}
} // namespace

void write_bitstream_file(const std::filesystem::path& path, std::uint64_t n,
                          const Bitstream& bits) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    write_le<std::uint32_t>(os, kVersion);
    write_le<std::uint64_t>(os, n);
    write_le<std::uint64_t>(os, bits.size_bits());
    auto bytes = bits.bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::pair<std::uint64_t, Bitstream> read_bitstream_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a bitstream file: " + path.string());
    std::uint32_t version = read_le<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("unsupported bitstream version " + std::to_string(version));
    std::uint64_t n = read_le<std::uint64_t>(is);
    std::uint64_t nbits = read_le<std::uint64_t>(is);
    std::vector<char> raw((nbits + 7) / 8);
    is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!is) throw TruncatedBitstream("bitstream file shorter than its declared bit count");
    Bitstream bits;
    for (std::uint64_t i = 0; i < nbits; ++i)
        bits.push_bit((raw[i >> 3] >> (7 - (i & 7))) & 1);
    return {n, bits};
}

} // namespace umc
