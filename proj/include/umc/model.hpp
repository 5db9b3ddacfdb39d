#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "umc/rng.hpp"
#include "umc/words.hpp"

namespace umc {

// One encoder broadcasting to J decoders. Decoder j observes side information
// over alphabet_y[j] and estimates a target over alphabet_z[j], emitting
// reconstruction symbols over alphabet_zt[j]. All alphabets are 0-based index
// sets; decoders are indexed 0..J-1 internally (1-based only at the CLI).
//
// w holds the memoryless per-letter channel P(y_1..y_J, z_1..z_J | x) as one
// dense row per x. Within a row, the (y-tuple, z-tuple) pair is packed with
// the y-tuple major; inside each tuple, decoder 0 is the most significant
// component (see pack_tuple).
struct SystemSpec {
    int J = 1;
    int alphabet_x = 2;
    std::vector<int> alphabet_y;   // size J
    std::vector<int> alphabet_z;   // size J
    std::vector<int> alphabet_zt;  // size J
    std::vector<std::vector<double>> w;   // [x][yz_packed]
    std::vector<std::vector<double>> d1;  // per j: [zt * alphabet_z[j] + z]
    std::vector<double> d_max;            // per j
    double d_max_global = 0.0;

    std::uint64_t y_product() const;
    std::uint64_t z_product() const;
    std::uint64_t pack_tuple(std::span<const Symbol> comps, std::span<const int> sizes) const;
    void unpack_y(std::uint64_t packed, std::span<Symbol> out) const;
    void unpack_z(std::uint64_t packed, std::span<Symbol> out) const;

    double distortion(int j, Symbol zt, Symbol z) const {
        return d1[j][static_cast<std::size_t>(zt) * alphabet_z[j] + z];
    }

    // Checks row sums (1e-12), probability and distortion ranges, alphabet
    // sizes, and that d_max_global == max_j d_max[j]. Throws std::invalid_argument.
    void validate() const;
};

// Fills d_max with the per-decoder maximum distortion entry and d_max_global
// with their maximum, then validates.
void finalize_spec(SystemSpec& spec);

// Per-letter law P(y_j, z_j | x) of one decoder, obtained by summing w over
// all other decoders' components.
struct MarginalChannel {
    int j = 0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> table;  // [x][y * nz + z]

    double p(Symbol x, Symbol y, Symbol z) const {
        return table[(static_cast<std::size_t>(x) * ny + y) * nz + z];
    }
    double side_prob(Symbol x, Symbol y) const;  // P(y | x)
};

MarginalChannel marginal_channel(const SystemSpec& spec, int j);

// P(z | x) for decoder j's target, as an [x][z] table.
std::vector<double> target_marginal(const SystemSpec& spec, int j);

// Stationary ergodic source over the encoder alphabet. The codec never sees
// this type; it exists only for experiment drivers.
struct SourceModel {
    enum class Kind { iid, markov, function_of_markov };
    Kind kind = Kind::iid;
    int nx = 0;
    std::vector<double> pmf;                       // iid
    std::vector<std::vector<double>> transition;   // markov / hidden chain
    std::vector<Symbol> emit;                      // function_of_markov: state -> x
    std::vector<double> start;                     // stationary distribution of the chain
};

SourceModel iid_source(std::vector<double> pmf);
// Throws std::invalid_argument unless the transition graph is irreducible and
// aperiodic; the start distribution is the stationary solve of pi T = pi.
SourceModel markov_source(std::vector<std::vector<double>> transition);
SourceModel function_of_markov_source(std::vector<std::vector<double>> transition,
                                      std::vector<Symbol> emit, int nx);

// pi T = pi, sum pi = 1, solved to 1e-12 residual.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition);

std::vector<Symbol> sample_source(const SourceModel& source, std::size_t n, Rng& rng);

// Exact l-block marginal P(X^l = a^l) of the source, indexed by packed word.
std::vector<double> block_pmf(const SourceModel& source, int l);

struct ChannelDraw {
    std::vector<std::vector<Symbol>> y;  // [j][i]
    std::vector<std::vector<Symbol>> z;  // [j][i]
};

// One memoryless pass of the channel over x^n.
ChannelDraw sample_channel(const SystemSpec& spec, std::span<const Symbol> x, Rng& rng);

// (1/n) sum_i d1[j](zt_i, z_i).
double block_distortion(const SystemSpec& spec, int j,
                        std::span<const Symbol> zt, std::span<const Symbol> z);

} // namespace umc
