#pragma once

#include <cmath>
#include <vector>

#include "umc/blockcode.hpp"
#include "umc/catalog.hpp"
#include "umc/model.hpp"
#include "umc/rng.hpp"

namespace umc::test {

inline std::vector<double> random_stochastic_row(Rng& rng, std::size_t len) {
    std::vector<double> row(len);
    double sum = 0.0;
    for (double& v : row) {
        v = -std::log(1.0 - rng.uniform01());
        sum += v;
    }
    for (double& v : row) v /= sum;
    // exact renormalization so validation at 1e-12 never flakes
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < len; ++i) acc += row[i];
    row[len - 1] = 1.0 - acc;
    return row;
}

// Small system with random channel and distortion tables. Alphabet sizes are
// kept at 2..3 so exhaustive oracles stay cheap.
inline SystemSpec random_tiny_spec(Rng& rng, int max_J = 2, int max_size = 3) {
    SystemSpec spec;
    spec.J = 1 + static_cast<int>(rng.below(max_J));
    auto size = [&] { return 2 + static_cast<int>(rng.below(max_size - 1)); };
    spec.alphabet_x = size();
    for (int j = 0; j < spec.J; ++j) {
        spec.alphabet_y.push_back(size());
        spec.alphabet_z.push_back(size());
        spec.alphabet_zt.push_back(size());
    }
    const std::uint64_t row_len = spec.y_product() * spec.z_product();
    for (int x = 0; x < spec.alphabet_x; ++x)
        spec.w.push_back(random_stochastic_row(rng, row_len));
    for (int j = 0; j < spec.J; ++j) {
        std::vector<double> d(static_cast<std::size_t>(spec.alphabet_zt[j]) * spec.alphabet_z[j]);
        for (double& v : d) v = rng.uniform01();
        spec.d1.push_back(std::move(d));
    }
    finalize_spec(spec);
    return spec;
}

inline BlockCode random_code(Rng& rng, const SystemSpec& spec, int l, std::uint32_t M) {
    BlockCode code;
    code.l = l;
    code.M = M;
    code.nx = spec.alphabet_x;
    code.ny = spec.alphabet_y;
    code.nzt = spec.alphabet_zt;
    code.enc.resize(checked_pow(spec.alphabet_x, l));
    for (auto& m : code.enc) m = static_cast<std::uint32_t>(rng.below(M));
    code.dec.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        const std::uint64_t cells = M * checked_pow(spec.alphabet_y[j], l);
        const std::uint64_t zw = checked_pow(spec.alphabet_zt[j], l);
        code.dec[j].resize(cells);
        for (auto& w : code.dec[j]) w = static_cast<std::uint32_t>(rng.below(zw));
    }
    return code;
}

inline std::vector<Symbol> random_sequence(Rng& rng, int alphabet, std::size_t n) {
    std::vector<Symbol> x(n);
    for (auto& s : x) s = static_cast<Symbol>(rng.below(alphabet));
    return x;
}

struct MonteCarlo {
    double mean = 0.0;
    double sigma_mean = 0.0;  // std error of the mean
};

// Sampled distortion of a fixed input block under repeated channel draws.
inline MonteCarlo mc_block_distortion(const SystemSpec& spec, const BlockCode& code, int j,
                                      std::span<const Symbol> a, std::size_t draws,
                                      std::uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < draws; ++t) {
        ChannelDraw draw = sample_channel(spec, a, rng);
        const std::uint32_t m = encode_block(code, a);
        const std::vector<Symbol> zt = decode_block(code, j, m, draw.y[j]);
        const double d = block_distortion(spec, j, zt, draw.z[j]);
        sum += d;
        sq += d * d;
    }
    MonteCarlo out;
    const double T = static_cast<double>(draws);
    out.mean = sum / T;
    const double var = std::max(0.0, (sq - sum * sum / T) / (T - 1.0));
    out.sigma_mean = std::sqrt(var / T);
    return out;
}

} // namespace umc::test
