#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "umc/model.hpp"

namespace umc {

// Length-l block code: an encoder table over X^l and one decoder table per
// decoder. Tables are total; words are stored packed (see words.hpp). The
// alphabet sizes ride along so a code is self-contained for table lookups and
// serialization; validate_code cross-checks them against a spec.
// dec[j] is indexed by m * ny[j]^l + packed(y^l) and holds packed
// reconstruction words.
struct BlockCode {
    int l = 1;
    std::uint32_t M = 1;
    int nx = 2;
    std::vector<int> ny;   // per decoder
    std::vector<int> nzt;  // per decoder
    std::vector<std::uint32_t> enc;               // size nx^l, values < M
    std::vector<std::vector<std::uint32_t>> dec;  // per decoder

    int decoders() const { return static_cast<int>(ny.size()); }

    bool operator==(const BlockCode&) const = default;
};

// Structural check against a spec (alphabets, table sizes, value ranges).
void validate_code(const SystemSpec& spec, const BlockCode& code);

// M <= floor(2^(l(R+eps))).
bool within_budget(const BlockCode& code, double R, double eps);

std::uint32_t encode_block(const BlockCode& code, std::span<const Symbol> a);

std::vector<Symbol> decode_block(const BlockCode& code, int j, std::uint32_t m,
                                 std::span<const Symbol> y);

// Per-letter channel quantities derived once from a spec and reused by every
// expected-distortion computation:
//   side[j][x][y]     = P(y | x)
//   cond[j][zt][x][y] = E[d1(zt, Z) | x, y]            (0 where P(y|x) = 0)
//   joint[j][zt][x][y] = sum_z P(y, z | x) d1(zt, z)
//   tail[j][zt][x]    = E[d1(zt, Z) | x]
struct ChannelTables {
    std::vector<MarginalChannel> marginal;
    std::vector<std::vector<double>> side;
    std::vector<std::vector<double>> cond;
    std::vector<std::vector<double>> joint;
    std::vector<std::vector<double>> tail;

    int nx = 0;
    std::vector<int> ny, nz, nzt;

    double side_p(int j, Symbol x, Symbol y) const {
        return side[j][static_cast<std::size_t>(x) * ny[j] + y];
    }
    double cond_e(int j, Symbol zt, Symbol x, Symbol y) const {
        return cond[j][(static_cast<std::size_t>(zt) * nx + x) * ny[j] + y];
    }
    double joint_e(int j, Symbol zt, Symbol x, Symbol y) const {
        return joint[j][(static_cast<std::size_t>(zt) * nx + x) * ny[j] + y];
    }
    double tail_e(int j, Symbol zt, Symbol x) const {
        return tail[j][static_cast<std::size_t>(zt) * nx + x];
    }
};

ChannelTables channel_tables(const SystemSpec& spec);

// Expected per-letter distortion of one input block under the code:
// sum over y^l of P(y^l | a^l) times the mean per-position conditional
// expected distortion of the reconstruction. Enumerates y^l only; the target
// is folded into per-position conditional expectations.
double expected_block_distortion(const ChannelTables& tables, const BlockCode& code,
                                 int j, std::uint64_t a_packed);
double expected_block_distortion(const SystemSpec& spec, const BlockCode& code,
                                 int j, std::span<const Symbol> a);

// pmf-weighted average of expected_block_distortion over X^l.
double expected_code_distortion(const SystemSpec& spec, const BlockCode& code,
                                int j, std::span<const double> pmf);

// Dense cache of expected block distortions: value[j][packed a^l].
struct DistortionTable {
    std::vector<std::vector<double>> value;
};

DistortionTable distortion_table(const ChannelTables& tables, const BlockCode& code);
DistortionTable distortion_table(const SystemSpec& spec, const BlockCode& code);

// Text serialization. A stream may hold any number of codes; '#' starts a
// comment. Layout per code:
//   blockcode v1
//   l <l> / M <M> / J <J> / x <nx> / y <ny_1..ny_J> / zt <nzt_1..nzt_J>
//   enc   followed by nx^l codeword indices
//   dec <j> (1-based) followed by M * ny_j^l packed reconstruction words
void write_codes(std::ostream& os, std::span<const BlockCode> codes);
std::vector<BlockCode> read_codes(std::istream& is);

} // namespace umc
