#include "umc/catalog.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "umc/rng.hpp"

namespace umc {

namespace {

std::uint64_t words_over(int base, int l) {
    return checked_pow(static_cast<std::uint64_t>(base), static_cast<std::uint64_t>(l));
}

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

// a * b^e, clamped at uint64 max.
std::uint64_t sat_pow_mul(std::uint64_t a, std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = 0; i < e; ++i) {
        if (a == kSaturated) return kSaturated;
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        a = p > kSaturated ? kSaturated : static_cast<std::uint64_t>(p);
    }
    return a;
}

} // namespace

std::uint64_t max_codebook_size(int l, const Budget& budget) {
    if (l < 1) throw std::invalid_argument("max_codebook_size: l must be >= 1");
    if (budget.R < 0.0 || budget.eps <= 0.0)
        throw std::invalid_argument("max_codebook_size: need R >= 0 and eps > 0");
    long double cap = std::floor(std::exp2l(static_cast<long double>(l) * (budget.R + budget.eps)));
    if (cap > static_cast<long double>(std::numeric_limits<std::uint32_t>::max()))
        throw std::invalid_argument("max_codebook_size: budget allows more codewords than supported");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(cap));
}

CountExceedsLimit::CountExceedsLimit(std::uint64_t count_, bool saturated_, std::uint64_t limit_)
    : std::runtime_error("code class has " + (saturated_ ? std::string("more than 2^64")
                                                         : std::to_string(count_)) +
                         " members, above the enumeration limit " + std::to_string(limit_)),
      count(count_), saturated(saturated_), limit(limit_) {}

std::uint64_t code_class_count(const SystemSpec& spec, int l, std::uint64_t M, bool* saturated) {
    const std::uint64_t xw = words_over(spec.alphabet_x, l);
    std::uint64_t count = sat_pow_mul(1, M, xw);
    for (int j = 0; j < spec.J; ++j) {
        const std::uint64_t yw = words_over(spec.alphabet_y[j], l);
        const std::uint64_t zw = words_over(spec.alphabet_zt[j], l);
        unsigned __int128 cells = static_cast<unsigned __int128>(M) * yw;
        if (cells > kSaturated) {
            count = kSaturated;
            break;
        }
        count = sat_pow_mul(count, zw, static_cast<std::uint64_t>(cells));
    }
    if (saturated) *saturated = (count == kSaturated);
    return count;
}

std::vector<BlockCode> enumerate_codes(const SystemSpec& spec, int l,
                                       const Budget& budget, std::uint64_t limit) {
    const std::uint64_t M = max_codebook_size(l, budget);
    bool saturated = false;
    const std::uint64_t count = code_class_count(spec, l, M, &saturated);
    if (saturated || count > limit) throw CountExceedsLimit(count, saturated, limit);

    const std::uint64_t xw = words_over(spec.alphabet_x, l);
    BlockCode proto;
    proto.l = l;
    proto.M = static_cast<std::uint32_t>(M);
    proto.nx = spec.alphabet_x;
    proto.ny = spec.alphabet_y;
    proto.nzt = spec.alphabet_zt;
    proto.enc.assign(xw, 0);
    proto.dec.resize(spec.J);
    std::vector<std::uint64_t> radix;  // one entry per table cell, in lexicographic order
    radix.insert(radix.end(), xw, M);
    for (int j = 0; j < spec.J; ++j) {
        const std::uint64_t cells = M * words_over(spec.alphabet_y[j], l);
        proto.dec[j].assign(cells, 0);
        radix.insert(radix.end(), cells, words_over(spec.alphabet_zt[j], l));
    }

    auto cell = [&](BlockCode& c, std::size_t k) -> std::uint32_t& {
        if (k < xw) return c.enc[k];
        k -= xw;
        for (int j = 0;; ++j) {
            if (k < c.dec[j].size()) return c.dec[j][k];
            k -= c.dec[j].size();
        }
    };

    std::vector<BlockCode> codes;
    codes.reserve(count);
    codes.push_back(proto);
    // odometer over the cells; the first cell is the most significant digit
    for (std::uint64_t idx = 1; idx < count; ++idx) {
        for (std::size_t k = radix.size(); k-- > 0;) {
            std::uint32_t& v = cell(proto, k);
            if (++v < radix[k]) break;
            v = 0;
        }
        codes.push_back(proto);
    }
    return codes;
}

BlockCode design_code(const SystemSpec& spec, int l, const DesignParams& params,
                      std::vector<double>* objective_history) {
    if (l < 1) throw std::invalid_argument("design_code: l must be >= 1");
    const std::uint64_t xw = words_over(spec.alphabet_x, l);
    const std::uint32_t M = params.M;
    if (M < 1) throw std::invalid_argument("design_code: M must be >= 1");

    std::vector<double> weights = params.weights;
    if (weights.empty()) weights.assign(spec.J, 1.0);
    if (weights.size() != static_cast<std::size_t>(spec.J))
        throw std::invalid_argument("design_code: one weight per decoder required");

    std::vector<double> pmf = params.training_pmf;
    if (pmf.empty()) pmf.assign(xw, 1.0 / static_cast<double>(xw));
    if (pmf.size() != xw) throw std::invalid_argument("design_code: training pmf size mismatch");

    const ChannelTables tables = channel_tables(spec);

    BlockCode code;
    code.l = l;
    code.M = M;
    code.nx = spec.alphabet_x;
    code.ny = spec.alphabet_y;
    code.nzt = spec.alphabet_zt;
    code.enc.assign(xw, 0);
    code.dec.resize(spec.J);
    Rng rng(params.seed);
    for (int j = 0; j < spec.J; ++j) {
        const std::uint64_t cells = M * words_over(spec.alphabet_y[j], l);
        const std::uint64_t zw = words_over(spec.alphabet_zt[j], l);
        code.dec[j].resize(cells);
        for (auto& w : code.dec[j]) w = static_cast<std::uint32_t>(rng.below(zw));
    }

    std::vector<Symbol> a(l), y(l), zt(l);
    auto objective = [&]() {
        double acc = 0.0;
        for (int j = 0; j < spec.J; ++j)
            for (std::uint64_t ap = 0; ap < xw; ++ap)
                if (pmf[ap] > 0.0)
                    acc += weights[j] * pmf[ap] * expected_block_distortion(tables, code, j, ap);
        return acc;
    };

    for (int iter = 0; iter < params.iterations; ++iter) {
        bool changed = false;

        // encoder step: cost[a][m] = sum_j w_j * bd_j(a | enc(a)=m)
        std::vector<double> cost(xw * M, 0.0);
        for (int j = 0; j < spec.J; ++j) {
            const std::uint64_t yw = words_over(spec.alphabet_y[j], l);
            const int nzt = spec.alphabet_zt[j];
            for (std::uint64_t ap = 0; ap < xw; ++ap) {
                unpack_word(ap, spec.alphabet_x, l, a);
                for (std::uint64_t yp = 0; yp < yw; ++yp) {
                    unpack_word(yp, spec.alphabet_y[j], l, y);
                    double prod = 1.0;
                    for (int i = 0; i < l; ++i) prod *= tables.side_p(j, a[i], y[i]);
                    if (prod == 0.0) continue;
                    for (std::uint32_t m = 0; m < M; ++m) {
                        unpack_word(code.dec[j][m * yw + yp], nzt, l, zt);
                        double inner = 0.0;
                        for (int i = 0; i < l; ++i) inner += tables.cond_e(j, zt[i], a[i], y[i]);
                        cost[ap * M + m] += weights[j] * prod * inner / static_cast<double>(l);
                    }
                }
            }
        }
        for (std::uint64_t ap = 0; ap < xw; ++ap) {
            std::uint32_t best = 0;
            for (std::uint32_t m = 1; m < M; ++m)
                if (cost[ap * M + m] < cost[ap * M + best]) best = m;
            if (code.enc[ap] != best) {
                code.enc[ap] = best;
                changed = true;
            }
        }

        // decoder step: rebuild every table entry position-wise from the
        // training posterior of the source block given (codeword, side block)
        std::vector<double> pre(l + 1), suf(l + 1);
        for (int j = 0; j < spec.J; ++j) {
            const std::uint64_t yw = words_over(spec.alphabet_y[j], l);
            const int nzt = spec.alphabet_zt[j];
            std::vector<double> score(M * static_cast<std::uint64_t>(l) * nzt);
            for (std::uint64_t yp = 0; yp < yw; ++yp) {
                unpack_word(yp, spec.alphabet_y[j], l, y);
                std::fill(score.begin(), score.end(), 0.0);
                for (std::uint64_t ap = 0; ap < xw; ++ap) {
                    if (pmf[ap] == 0.0) continue;
                    unpack_word(ap, spec.alphabet_x, l, a);
                    pre[0] = 1.0;
                    for (int i = 0; i < l; ++i) pre[i + 1] = pre[i] * tables.side_p(j, a[i], y[i]);
                    suf[l] = 1.0;
                    for (int i = l; i-- > 0;) suf[i] = suf[i + 1] * tables.side_p(j, a[i], y[i]);
                    const std::uint32_t m = code.enc[ap];
                    for (int i = 0; i < l; ++i) {
                        const double loo = pmf[ap] * pre[i] * suf[i + 1];
                        if (loo == 0.0) continue;
                        double* row = score.data() + (static_cast<std::uint64_t>(m) * l + i) * nzt;
                        for (int c = 0; c < nzt; ++c)
                            row[c] += loo * tables.joint_e(j, c, a[i], y[i]);
                    }
                }
                for (std::uint32_t m = 0; m < M; ++m) {
                    for (int i = 0; i < l; ++i) {
                        const double* row = score.data() + (static_cast<std::uint64_t>(m) * l + i) * nzt;
                        int best = 0;
                        for (int c = 1; c < nzt; ++c)
                            if (row[c] < row[best]) best = c;
                        zt[i] = best;
                    }
                    std::uint32_t packed = static_cast<std::uint32_t>(pack_word(zt, nzt));
                    if (code.dec[j][m * yw + yp] != packed) {
                        code.dec[j][m * yw + yp] = packed;
                        changed = true;
                    }
                }
            }
        }

        if (objective_history) objective_history->push_back(objective());
        if (!changed) break;
    }
    return code;
}

const CatalogSlot& CodeCatalog::slot(int l) const {
    if (l < 1 || l > max_l())
        throw std::invalid_argument("CodeCatalog: no slot for block length " + std::to_string(l));
    return slots[l - 1];
}

int index_width(const CodeCatalog& catalog, int l) {
    const CatalogSlot& slot = catalog.slot(l);
    if (slot.codes.empty())
        throw std::invalid_argument("index_width: empty catalog slot " + std::to_string(l));
    return slot.index_bits;
}

CodeCatalog build_catalog(const SystemSpec& spec, const Budget& budget,
                          const CatalogConfig& config, bool parallel) {
    if (config.l_max < 1) throw std::invalid_argument("build_catalog: l_max must be >= 1");
    spec.validate();

    CodeCatalog catalog;
    catalog.budget = budget;
    catalog.slots.resize(config.l_max);

    for (int l = 1; l <= config.l_max; ++l) {
        CatalogSlot& slot = catalog.slots[l - 1];
        slot.l = l;
        for (const BlockCode& code : config.injected)
            if (code.l == l) slot.codes.push_back(code);

        if (config.mode == CatalogConfig::Mode::enumerate_all) {
            auto all = enumerate_codes(spec, l, budget, config.limit);
            slot.codes.insert(slot.codes.end(), all.begin(), all.end());
        } else {
            std::vector<DesignParams> designs;
            if (static_cast<int>(config.designs.size()) >= l)
                designs = config.designs[l - 1];
            else if (config.designs.empty()) {
                DesignParams d;
                d.M = static_cast<std::uint32_t>(
                    std::min(max_codebook_size(l, budget),
                             checked_pow(spec.alphabet_x, static_cast<std::uint64_t>(l))));
                designs.push_back(d);
            }
            for (DesignParams d : designs) {
                if (d.M == 0)
                    d.M = static_cast<std::uint32_t>(
                        std::min(max_codebook_size(l, budget),
                                 checked_pow(spec.alphabet_x, static_cast<std::uint64_t>(l))));
                slot.codes.push_back(design_code(spec, l, d));
            }
        }

        for (const BlockCode& code : slot.codes) {
            validate_code(spec, code);
            if (!within_budget(code, budget.R, budget.eps))
                throw std::invalid_argument("build_catalog: code exceeds the rate budget at l=" +
                                            std::to_string(l));
        }

        // dedup by exact table equality, first occurrence wins
        std::vector<BlockCode> unique;
        for (BlockCode& code : slot.codes) {
            bool seen = false;
            for (const BlockCode& u : unique)
                if (u == code) {
                    seen = true;
                    break;
                }
            if (!seen) unique.push_back(std::move(code));
        }
        slot.codes = std::move(unique);
        if (slot.codes.empty())
            throw std::invalid_argument("build_catalog: slot " + std::to_string(l) +
                                        " ended up empty");
        slot.index_bits = slot.codes.size() <= 1
                              ? 0
                              : std::bit_width(slot.codes.size() - 1);
        slot.tables.resize(slot.codes.size());
    }

    // precompute distortion tables; codes are independent jobs
    const ChannelTables tables = channel_tables(spec);
    std::vector<std::pair<int, std::size_t>> jobs;
    for (int l = 1; l <= config.l_max; ++l)
        for (std::size_t i = 0; i < catalog.slots[l - 1].codes.size(); ++i)
            jobs.emplace_back(l, i);

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(jobs.size()); ++k) {
            auto [l, i] = jobs[static_cast<std::size_t>(k)];
            CatalogSlot& slot = catalog.slots[l - 1];
            slot.tables[i] = distortion_table(tables, slot.codes[i]);
        }
    } else {
        for (auto [l, i] : jobs) {
            CatalogSlot& slot = catalog.slots[l - 1];
            slot.tables[i] = distortion_table(tables, slot.codes[i]);
        }
    }
    return catalog;
}

} // namespace umc
