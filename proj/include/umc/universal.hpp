#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "umc/bitstream.hpp"
#include "umc/catalog.hpp"
#include "umc/empirical.hpp"

namespace umc {

// Operating point of the universal codec. epsilon is derived as
// delta / (4J + 2 d_max_global), which makes 4J*eps + 2*eps*d_max <= delta
// hold by construction. The codec sees only (R, Delta, delta, the known
// channel, and the shared catalog) -- never the source law.
struct CodecConfig {
    double R = 1.0;
    double delta = 0.3;
    std::vector<double> Delta;  // per decoder
    double epsilon = 0.0;
    int l_cap = 0;  // 0 = no cap beyond the window rule and catalog depth

    Budget budget() const { return Budget{R, epsilon}; }
};

CodecConfig make_codec_config(const SystemSpec& spec, double R, double delta,
                              std::vector<double> Delta, int l_cap = 0);

// Window cap k_n = max(1, floor(log2 log2 n)), computed in integer arithmetic.
// Requires n >= 4.
int window_cap(std::uint64_t n);

// min(k_n, l_cap, catalog depth); throws if the catalog is missing a slot.
int effective_window(std::uint64_t n, const CodecConfig& config, const CodeCatalog& catalog);

// Outcome of the encoder's search: block length, offset, catalog index, and
// per-decoder slack (windowed average expected distortion minus Delta_j).
// When no candidate meets every target the error flag is set and the plan
// falls back to (l=1, s=0, code 0); the fallback is serialized normally and
// the flag travels only in metadata.
struct EncodePlan {
    int l = 1;
    int s = 0;
    std::uint32_t code_index = 0;
    bool error_declared = false;
    std::vector<double> slack;

    bool operator==(const EncodePlan&) const = default;
};

// Scans every (l, s, code) with l <= effective_window. A candidate qualifies
// when its per-decoder windowed average expected distortion is within
// Delta_j + 4*J*eps for all j; among qualifiers the plan minimizes
// max_j slack_j / d_max_j, ties broken by smaller l, then s, then code index.
EncodePlan select_plan(std::span<const Symbol> x, const SystemSpec& spec,
                       const CodecConfig& config, const CodeCatalog& catalog);

// Reference implementation of the same scan (straight loops, running best).
// Kept for testing; must agree exactly with select_plan.
EncodePlan select_plan_serial(std::span<const Symbol> x, const SystemSpec& spec,
                              const CodecConfig& config, const CodeCatalog& catalog);

// Bit layout, in order:
//   (a) l-1 and s, each in w = ceil(log2 k_eff) bits (w = 0 when k_eff = 1);
//   (b) the code index in index_width(catalog, l) bits;
//   (c) the B = floor((n-s)/l) block codewords as one radix-M integer in
//       exactly ceil(B log2 M) bits (none when M = 1).
// Deterministic: byte-identical streams for identical inputs.
std::pair<Bitstream, EncodePlan> encode(std::span<const Symbol> x, const SystemSpec& spec,
                                        const CodecConfig& config, const CodeCatalog& catalog);

// Decoder j: parses the header, applies its table per block, and fills the
// uncovered prefix/suffix (at most 2l symbols) with reconstruction symbol 0.
// Reads only its own side information.
std::vector<Symbol> decode(const Bitstream& bits, int j, std::span<const Symbol> y_j,
                           std::uint64_t n, const SystemSpec& spec,
                           const CodecConfig& config, const CodeCatalog& catalog);

// Exact conditional expected distortion of the emitted reconstruction given
// x^n: block terms from the catalog's cached tables plus the exact expected
// distortion of the constant tail fill.
double exact_conditional_distortion(std::span<const Symbol> x, const EncodePlan& plan,
                                    const SystemSpec& spec, const CodecConfig& config,
                                    const CodeCatalog& catalog, int j);

// Smallest n such that the worst-case header overhead keeps every encoded
// sequence within rate R + delta from that point on.
std::uint64_t rate_horizon_n0(const CodecConfig& config, const CodeCatalog& catalog);

} // namespace umc
