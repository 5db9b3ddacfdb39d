#include "umc/universal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace umc {

namespace {

int ceil_log2(std::uint64_t count) {
    return count <= 1 ? 0 : static_cast<int>(std::bit_width(count - 1));
}

struct CandidateKey {
    double norm_slack = std::numeric_limits<double>::infinity();
    int l = 0;
    int s = 0;
    std::uint32_t index = 0;

    bool operator<(const CandidateKey& o) const {
        if (norm_slack != o.norm_slack) return norm_slack < o.norm_slack;
        if (l != o.l) return l < o.l;
        if (s != o.s) return s < o.s;
        return index < o.index;
    }
};

// Windowed average expected distortion of one candidate, per decoder. The
// summation order is fixed (ascending word) so every caller computes
// bit-identical values.
std::vector<double> candidate_values(const EmpiricalDistribution& q,
                                     const DistortionTable& table, int J) {
    std::vector<double> values(J, 0.0);
    for (int j = 0; j < J; ++j) {
        const auto& bd = table.value[j];
        double acc = 0.0;
        for (std::size_t a = 0; a < bd.size(); ++a)
            if (q.counts[a] != 0) acc += static_cast<double>(q.counts[a]) * bd[a];
        values[j] = acc / static_cast<double>(q.total);
    }
    return values;
}

struct Candidate {
    int l, s;
    std::uint32_t index;
};

struct Evaluated {
    bool qualifies = false;
    CandidateKey key;
    std::vector<double> slack;
};

Evaluated evaluate(const Candidate& cand, const EmpiricalDistribution& q,
                   const SystemSpec& spec, const CodecConfig& config,
                   const CodeCatalog& catalog) {
    const DistortionTable& table = catalog.slot(cand.l).tables[cand.index];
    std::vector<double> values = candidate_values(q, table, spec.J);
    const double margin = 4.0 * spec.J * config.epsilon;

    Evaluated ev;
    ev.qualifies = true;
    ev.slack.resize(spec.J);
    double norm = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.J; ++j) {
        ev.slack[j] = values[j] - config.Delta[j];
        if (values[j] > config.Delta[j] + margin) ev.qualifies = false;
        // a zero-ceiling decoder has slack <= 0 always; it ranks neutrally
        norm = std::max(norm, spec.d_max[j] > 0.0 ? ev.slack[j] / spec.d_max[j] : 0.0);
    }
    ev.key = CandidateKey{norm, cand.l, cand.s, cand.index};
    return ev;
}

EncodePlan plan_from(const Candidate& cand, const Evaluated& ev, bool error) {
    EncodePlan plan;
    plan.l = cand.l;
    plan.s = cand.s;
    plan.code_index = cand.index;
    plan.error_declared = error;
    plan.slack = ev.slack;
    return plan;
}

void check_inputs(std::span<const Symbol> x, const SystemSpec& spec, const CodecConfig& config) {
    if (static_cast<int>(config.Delta.size()) != spec.J)
        throw std::invalid_argument("CodecConfig: one Delta per decoder required");
    if (!(config.epsilon > 0.0))
        throw std::invalid_argument("CodecConfig: epsilon must be positive");
    for (Symbol s : x)
        if (s < 0 || s >= spec.alphabet_x)
            throw std::invalid_argument("encode: symbol out of alphabet");
}

} // namespace

CodecConfig make_codec_config(const SystemSpec& spec, double R, double delta,
                              std::vector<double> Delta, int l_cap) {
    if (R < 0.0) throw std::invalid_argument("make_codec_config: R must be >= 0");
    if (!(delta > 0.0)) throw std::invalid_argument("make_codec_config: delta must be > 0");
    if (static_cast<int>(Delta.size()) != spec.J)
        throw std::invalid_argument("make_codec_config: one Delta per decoder required");
    for (double d : Delta)
        if (!(d >= 0.0)) throw std::invalid_argument("make_codec_config: Delta must be >= 0");
    CodecConfig config;
    config.R = R;
    config.delta = delta;
    config.Delta = std::move(Delta);
    config.epsilon = delta / (4.0 * spec.J + 2.0 * spec.d_max_global);
    config.l_cap = l_cap;
    return config;
}

int window_cap(std::uint64_t n) {
    if (n < 4) throw std::invalid_argument("window_cap: n must be >= 4");
    auto ilog2 = [](std::uint64_t v) { return static_cast<int>(std::bit_width(v)) - 1; };
    return std::max(1, ilog2(static_cast<std::uint64_t>(ilog2(n))));
}

int effective_window(std::uint64_t n, const CodecConfig& config, const CodeCatalog& catalog) {
    int k = window_cap(n);
    if (config.l_cap > 0) k = std::min(k, config.l_cap);
    if (catalog.max_l() < k)
        throw std::invalid_argument("catalog is missing slots up to block length " +
                                    std::to_string(k) + "; set l_cap or deepen the catalog");
    for (int l = 1; l <= k; ++l)
        if (catalog.slot(l).codes.empty())
            throw std::invalid_argument("catalog slot " + std::to_string(l) + " is empty");
    return k;
}

EncodePlan select_plan_serial(std::span<const Symbol> x, const SystemSpec& spec,
                              const CodecConfig& config, const CodeCatalog& catalog) {
    check_inputs(x, spec, config);
    const int k_eff = effective_window(x.size(), config, catalog);

    bool found = false;
    CandidateKey best_key;
    Candidate best_cand{1, 0, 0};
    Evaluated best_ev;

    for (int l = 1; l <= k_eff; ++l) {
        const CatalogSlot& slot = catalog.slot(l);
        for (int s = 0; s < l; ++s) {
            const EmpiricalDistribution q = nonoverlapping_empirical(x, spec.alphabet_x, l, s);
            for (std::uint32_t idx = 0; idx < slot.codes.size(); ++idx) {
                Candidate cand{l, s, idx};
                Evaluated ev = evaluate(cand, q, spec, config, catalog);
                if (!ev.qualifies) continue;
                if (!found || ev.key < best_key) {
                    found = true;
                    best_key = ev.key;
                    best_cand = cand;
                    best_ev = ev;
                }
            }
        }
    }
    if (found) return plan_from(best_cand, best_ev, false);

    Candidate fallback{1, 0, 0};
    const EmpiricalDistribution q = nonoverlapping_empirical(x, spec.alphabet_x, 1, 0);
    Evaluated ev = evaluate(fallback, q, spec, config, catalog);
    return plan_from(fallback, ev, true);
}

EncodePlan select_plan(std::span<const Symbol> x, const SystemSpec& spec,
                       const CodecConfig& config, const CodeCatalog& catalog) {
    check_inputs(x, spec, config);
    const int k_eff = effective_window(x.size(), config, catalog);

    // block types are shared across the codes of a slot; compute them once
    std::vector<std::vector<EmpiricalDistribution>> q(k_eff + 1);
    for (int l = 1; l <= k_eff; ++l) {
        q[l].reserve(l);
        for (int s = 0; s < l; ++s)
            q[l].push_back(nonoverlapping_empirical(x, spec.alphabet_x, l, s));
    }

    std::vector<Candidate> candidates;
    for (int l = 1; l <= k_eff; ++l)
        for (int s = 0; s < l; ++s)
            for (std::uint32_t idx = 0; idx < catalog.slot(l).codes.size(); ++idx)
                candidates.push_back(Candidate{l, s, idx});

    std::vector<Evaluated> evaluated(candidates.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(candidates.size()); ++k) {
        const Candidate& cand = candidates[static_cast<std::size_t>(k)];
        evaluated[static_cast<std::size_t>(k)] =
            evaluate(cand, q[cand.l][cand.s], spec, config, catalog);
    }

    // deterministic reduction: strict total order on candidate keys
    std::int64_t best = -1;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(candidates.size()); ++k) {
        if (!evaluated[static_cast<std::size_t>(k)].qualifies) continue;
        if (best < 0 || evaluated[static_cast<std::size_t>(k)].key <
                            evaluated[static_cast<std::size_t>(best)].key)
            best = k;
    }
    if (best >= 0)
        return plan_from(candidates[static_cast<std::size_t>(best)],
                         evaluated[static_cast<std::size_t>(best)], false);

    Candidate fallback{1, 0, 0};
    Evaluated ev = evaluate(fallback, q[1][0], spec, config, catalog);
    return plan_from(fallback, ev, true);
}

std::pair<Bitstream, EncodePlan> encode(std::span<const Symbol> x, const SystemSpec& spec,
                                        const CodecConfig& config, const CodeCatalog& catalog) {
    const EncodePlan plan = select_plan(x, spec, config, catalog);
    const std::uint64_t n = x.size();
    const int k_eff = effective_window(n, config, catalog);
    const int w = ceil_log2(static_cast<std::uint64_t>(k_eff));

    const CatalogSlot& slot = catalog.slot(plan.l);
    const BlockCode& code = slot.codes[plan.code_index];

    Bitstream bits;
    bits.push_bits(static_cast<std::uint64_t>(plan.l - 1), w);
    bits.push_bits(static_cast<std::uint64_t>(plan.s), w);
    bits.push_bits(plan.code_index, slot.index_bits);

    const std::uint64_t B = (n - static_cast<std::uint64_t>(plan.s)) /
                            static_cast<std::uint64_t>(plan.l);
    std::vector<std::uint32_t> digits(B);
    for (std::uint64_t i = 0; i < B; ++i) {
        auto block = x.subspan(plan.s + i * static_cast<std::uint64_t>(plan.l), plan.l);
        digits[i] = code.enc[pack_word(block, code.nx)];
    }
    pack_radix(digits, code.M, bits);
    return {std::move(bits), plan};
}

std::vector<Symbol> decode(const Bitstream& bits, int j, std::span<const Symbol> y_j,
                           std::uint64_t n, const SystemSpec& spec,
                           const CodecConfig& config, const CodeCatalog& catalog) {
    if (j < 0 || j >= spec.J) throw std::invalid_argument("decode: decoder index out of range");
    if (y_j.size() != n) throw std::invalid_argument("decode: side information length mismatch");
    for (Symbol s : y_j)
        if (s < 0 || s >= spec.alphabet_y[j])
            throw std::invalid_argument("decode: side symbol out of alphabet");

    const int k_eff = effective_window(n, config, catalog);
    const int w = ceil_log2(static_cast<std::uint64_t>(k_eff));

    BitReader reader(bits);
    const int l = static_cast<int>(reader.read_bits(w)) + 1;
    const int s = static_cast<int>(reader.read_bits(w));
    if (l > k_eff)
        throw IndexOutOfCatalog("decoded block length " + std::to_string(l) +
                                " exceeds the window cap " + std::to_string(k_eff));
    if (s >= l)
        throw IndexOutOfCatalog("decoded offset " + std::to_string(s) +
                                " not below block length " + std::to_string(l));
    const CatalogSlot& slot = catalog.slot(l);
    const std::uint64_t index = reader.read_bits(slot.index_bits);
    if (index >= slot.codes.size())
        throw IndexOutOfCatalog("decoded code index " + std::to_string(index) +
                                " outside catalog slot of size " +
                                std::to_string(slot.codes.size()));
    const BlockCode& code = slot.codes[index];

    const std::uint64_t B = (n - static_cast<std::uint64_t>(s)) / static_cast<std::uint64_t>(l);
    const std::vector<std::uint32_t> digits = unpack_radix(reader, code.M, B);

    // uncovered prefix/suffix filled with reconstruction symbol 0
    std::vector<Symbol> out(n, 0);
    const std::uint64_t yw = checked_pow(code.ny[j], static_cast<std::uint64_t>(l));
    std::vector<Symbol> zt(l);
    for (std::uint64_t i = 0; i < B; ++i) {
        auto yblock = y_j.subspan(s + i * static_cast<std::uint64_t>(l), l);
        const std::uint32_t packed = code.dec[j][digits[i] * yw + pack_word(yblock, code.ny[j])];
        unpack_word(packed, code.nzt[j], l, zt);
        std::copy(zt.begin(), zt.end(), out.begin() + s + i * static_cast<std::uint64_t>(l));
    }
    return out;
}

double exact_conditional_distortion(std::span<const Symbol> x, const EncodePlan& plan,
                                    const SystemSpec& spec, const CodecConfig& config,
                                    const CodeCatalog& catalog, int j) {
    (void)config;
    if (j < 0 || j >= spec.J)
        throw std::invalid_argument("exact_conditional_distortion: decoder index out of range");
    const std::uint64_t n = x.size();
    const CatalogSlot& slot = catalog.slot(plan.l);
    const BlockCode& code = slot.codes[plan.code_index];
    const auto& bd = slot.tables[plan.code_index].value[j];

    const std::uint64_t B = (n - static_cast<std::uint64_t>(plan.s)) /
                            static_cast<std::uint64_t>(plan.l);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < B; ++i) {
        auto block = x.subspan(plan.s + i * static_cast<std::uint64_t>(plan.l), plan.l);
        acc += static_cast<double>(plan.l) * bd[pack_word(block, code.nx)];
    }

    // exact expected distortion of the constant fill over the tails
    const std::vector<double> tz = target_marginal(spec, j);
    const int nz = spec.alphabet_z[j];
    auto fill_term = [&](Symbol xs) {
        double e = 0.0;
        for (int z = 0; z < nz; ++z)
            e += tz[static_cast<std::size_t>(xs) * nz + z] * spec.distortion(j, 0, z);
        return e;
    };
    for (int t = 0; t < plan.s; ++t) acc += fill_term(x[t]);
    for (std::uint64_t t = plan.s + B * static_cast<std::uint64_t>(plan.l); t < n; ++t)
        acc += fill_term(x[t]);

    return acc / static_cast<double>(n);
}

std::uint64_t rate_horizon_n0(const CodecConfig& config, const CodeCatalog& catalog) {
    if (!(config.delta > config.epsilon))
        throw std::invalid_argument("rate_horizon_n0: need delta > epsilon");
    int k_max = catalog.max_l();
    if (config.l_cap > 0) k_max = std::min(k_max, config.l_cap);
    int iw_max = 0;
    for (int l = 1; l <= k_max; ++l) iw_max = std::max(iw_max, index_width(catalog, l));
    const double overhead = 2.0 * ceil_log2(static_cast<std::uint64_t>(k_max)) + iw_max + 1.0;
    const double n0 = std::ceil(overhead / (config.delta - config.epsilon));
    return std::max<std::uint64_t>(4, static_cast<std::uint64_t>(n0));
}

} // namespace umc
