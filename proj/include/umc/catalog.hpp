#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "umc/blockcode.hpp"

namespace umc {

// Rate budget shared by encoder and decoders: codes at block length l may use
// at most floor(2^(l(R+eps))) codewords.
struct Budget {
    double R = 1.0;
    double eps = 0.05;
};

std::uint64_t max_codebook_size(int l, const Budget& budget);

struct CountExceedsLimit : std::runtime_error {
    CountExceedsLimit(std::uint64_t count_, bool saturated_, std::uint64_t limit_);
    std::uint64_t count;   // saturated at uint64 max when `saturated`
    bool saturated;
    std::uint64_t limit;
};

// Exact number of distinct total tables at block length l with M codewords:
// M^(nx^l) * prod_j (nzt_j^l)^(M * ny_j^l). Saturates at uint64 max.
std::uint64_t code_class_count(const SystemSpec& spec, int l, std::uint64_t M,
                               bool* saturated = nullptr);

// Every code of the class, in lexicographic table order (encoder entries are
// the most significant digits, then decoder 0's table, and so on). Throws
// CountExceedsLimit when the class is larger than `limit`.
std::vector<BlockCode> enumerate_codes(const SystemSpec& spec, int l,
                                       const Budget& budget, std::uint64_t limit);

struct DesignParams {
    std::uint32_t M = 1;
    std::uint64_t seed = 1;
    int iterations = 30;
    std::vector<double> weights;       // per decoder; empty = all ones
    std::vector<double> training_pmf;  // over X^l; empty = uniform
};

// Alternating table optimization: reassign each encoder cell to the codeword
// with the least weighted expected distortion, then rebuild each decoder
// entry position-wise as the reconstruction symbol minimizing the
// training-pmf-weighted expected distortion given (codeword, side block).
// Ties pick the lowest index, so the result is a pure function of the inputs.
// The objective (weighted expected code distortion) never increases.
BlockCode design_code(const SystemSpec& spec, int l, const DesignParams& params,
                      std::vector<double>* objective_history = nullptr);

struct CatalogConfig {
    enum class Mode { enumerate_all, design };
    Mode mode = Mode::design;
    int l_max = 1;
    std::uint64_t limit = 2'000'000;            // enumerate mode guard
    std::vector<std::vector<DesignParams>> designs;  // per slot (index l-1); may be ragged
    std::vector<BlockCode> injected;            // placed first, in order, into their l slot
};

struct CatalogSlot {
    int l = 1;
    std::vector<BlockCode> codes;
    std::vector<DistortionTable> tables;  // cached expected block distortions
    int index_bits = 0;
};

// Shared, deterministically ordered family of candidate codes per block
// length, with distortion tables precomputed against one spec. Encoder and
// decoders must be built from the same descriptor: a code is transmitted as
// its index into the slot.
struct CodeCatalog {
    Budget budget;
    std::vector<CatalogSlot> slots;  // slots[i].l == i + 1

    int max_l() const { return static_cast<int>(slots.size()); }
    const CatalogSlot& slot(int l) const;
};

// Deterministic build: injected codes first (file order), then designed or
// enumerated codes; exact duplicates dropped keeping the first occurrence.
// All entries are budget-checked. Table precomputation parallelizes across
// codes; results are identical either way.
CodeCatalog build_catalog(const SystemSpec& spec, const Budget& budget,
                          const CatalogConfig& config, bool parallel = true);

int index_width(const CodeCatalog& catalog, int l);

} // namespace umc
