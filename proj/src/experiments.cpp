#include "umc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace umc {

namespace {

std::vector<double> hamming_table(int n) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
    return d;
}

double bsc(double p, Symbol in, Symbol out) { return in == out ? 1.0 - p : p; }

void check_prob(double p, const char* what) {
    if (!(p >= 0.0) || !(p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must be in [0,1]");
}

// l=1 code sending m = f(x) with every decoder reading the codeword directly.
BlockCode message_code(const SystemSpec& spec, std::vector<std::uint32_t> enc, std::uint32_t M) {
    BlockCode c;
    c.l = 1;
    c.M = M;
    c.nx = spec.alphabet_x;
    c.ny = spec.alphabet_y;
    c.nzt = spec.alphabet_zt;
    c.enc = std::move(enc);
    c.dec.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        c.dec[j].resize(static_cast<std::size_t>(M) * spec.alphabet_y[j]);
        for (std::uint32_t m = 0; m < M; ++m)
            for (int y = 0; y < spec.alphabet_y[j]; ++y)
                c.dec[j][static_cast<std::size_t>(m) * spec.alphabet_y[j] + y] = m;
    }
    return c;
}

// l=1, M=1 code: decoder j emits g_j(y); the encoder carries nothing.
BlockCode side_only_code(const SystemSpec& spec, bool copy_side) {
    BlockCode c;
    c.l = 1;
    c.M = 1;
    c.nx = spec.alphabet_x;
    c.ny = spec.alphabet_y;
    c.nzt = spec.alphabet_zt;
    c.enc.assign(spec.alphabet_x, 0);
    c.dec.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        c.dec[j].resize(spec.alphabet_y[j]);
        for (int y = 0; y < spec.alphabet_y[j]; ++y)
            c.dec[j][y] = copy_side ? static_cast<std::uint32_t>(
                                          std::min(y, spec.alphabet_zt[j] - 1))
                                    : 0u;
    }
    return c;
}

DesignParams slot_design(std::uint32_t M, std::uint64_t seed) {
    DesignParams d;
    d.M = M;
    d.seed = seed;
    d.iterations = 40;
    return d;
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"wyner_ziv", "si_maybe_absent", "complementary_delivery", "fig4", "custom"};
}

std::string scenario_summary(const std::string& name) {
    if (name == "wyner_ziv")
        return "J=1 decoder estimating X with side information X+BSC(p_side)";
    if (name == "si_maybe_absent")
        return "J=2: decoder 1 has no side information, decoder 2 sees X+BSC(p_side); both estimate X";
    if (name == "complementary_delivery")
        return "J=2: X=(X1,X2) DSBS(rho); decoder j knows the other component and estimates its own";
    if (name == "fig4")
        return "J=2: X=(X0,X1,X2), X_i = X0+Bern(p_i); decoder j sees X_j and estimates X0";
    if (name == "custom") return "system, source, codec, and catalog all taken from the config file";
    throw std::invalid_argument("unknown scenario: " + name);
}

ScenarioPreset wyner_ziv_preset(double p_side) {
    check_prob(p_side, "p_side");
    ScenarioPreset preset;
    preset.name = "wyner_ziv";

    SystemSpec& spec = preset.spec;
    spec.J = 1;
    spec.alphabet_x = 2;
    spec.alphabet_y = {2};
    spec.alphabet_z = {2};
    spec.alphabet_zt = {2};
    spec.w.assign(2, std::vector<double>(4, 0.0));
    for (Symbol x = 0; x < 2; ++x)
        for (Symbol y = 0; y < 2; ++y)
            spec.w[x][static_cast<std::size_t>(y) * 2 + x] = bsc(p_side, x, y);  // z = x
    spec.d1 = {hamming_table(2)};
    finalize_spec(spec);

    preset.source = iid_source({0.5, 0.5});
    preset.codec = make_codec_config(spec, 1.0, 0.3, {0.05}, 2);

    preset.catalog.mode = CatalogConfig::Mode::design;
    preset.catalog.l_max = 2;
    preset.catalog.injected = {
        message_code(spec, {0, 1}, 2),    // send x, ignore side info
        side_only_code(spec, true),       // emit the side symbol
        side_only_code(spec, false),      // constant 0
    };
    preset.catalog.designs = {{slot_design(2, 1)}, {slot_design(4, 1)}};
    return preset;
}

ScenarioPreset si_maybe_absent_preset(double p_side) {
    check_prob(p_side, "p_side");
    ScenarioPreset preset;
    preset.name = "si_maybe_absent";

    SystemSpec& spec = preset.spec;
    spec.J = 2;
    spec.alphabet_x = 2;
    spec.alphabet_y = {1, 2};  // decoder 0 sees nothing
    spec.alphabet_z = {2, 2};
    spec.alphabet_zt = {2, 2};
    // row index: (y1*2 + y2)*4 + (z1*2 + z2) with y1 always 0
    spec.w.assign(2, std::vector<double>(8, 0.0));
    for (Symbol x = 0; x < 2; ++x)
        for (Symbol y2 = 0; y2 < 2; ++y2)
            spec.w[x][static_cast<std::size_t>(y2) * 4 + x * 2 + x] = bsc(p_side, x, y2);
    spec.d1 = {hamming_table(2), hamming_table(2)};
    finalize_spec(spec);

    preset.source = iid_source({0.5, 0.5});
    preset.codec = make_codec_config(spec, 1.0, 0.3, {0.15, 0.05}, 2);

    preset.catalog.mode = CatalogConfig::Mode::design;
    preset.catalog.l_max = 2;
    preset.catalog.injected = {
        message_code(spec, {0, 1}, 2),
        side_only_code(spec, true),
        side_only_code(spec, false),
    };
    preset.catalog.designs = {{slot_design(2, 1)}, {slot_design(4, 1)}};
    return preset;
}

ScenarioPreset complementary_delivery_preset(double rho) {
    check_prob(rho, "rho");
    ScenarioPreset preset;
    preset.name = "complementary_delivery";

    SystemSpec& spec = preset.spec;
    spec.J = 2;
    spec.alphabet_x = 4;  // (x1, x2) packed as 2*x1 + x2
    spec.alphabet_y = {2, 2};
    spec.alphabet_z = {2, 2};
    spec.alphabet_zt = {2, 2};
    spec.w.assign(4, std::vector<double>(16, 0.0));
    for (Symbol x = 0; x < 4; ++x) {
        const Symbol x1 = x >> 1, x2 = x & 1;
        // y1 = x2, y2 = x1, z1 = x1, z2 = x2
        spec.w[x][(static_cast<std::size_t>(x2) * 2 + x1) * 4 + (x1 * 2 + x2)] = 1.0;
    }
    spec.d1 = {hamming_table(2), hamming_table(2)};
    finalize_spec(spec);

    std::vector<double> pair_pmf(4);
    for (Symbol x = 0; x < 4; ++x) {
        const Symbol x1 = x >> 1, x2 = x & 1;
        pair_pmf[x] = 0.5 * (x1 == x2 ? 1.0 - rho : rho);
    }
    preset.source = iid_source(pair_pmf);
    preset.codec = make_codec_config(spec, 1.0, 0.25, {0.0, 0.0}, 2);

    // parity code: m = x1 xor x2; decoder j xors its side symbol back
    BlockCode parity;
    parity.l = 1;
    parity.M = 2;
    parity.nx = 4;
    parity.ny = {2, 2};
    parity.nzt = {2, 2};
    parity.enc = {0, 1, 1, 0};
    parity.dec = {{0, 1, 1, 0}, {0, 1, 1, 0}};

    preset.catalog.mode = CatalogConfig::Mode::design;
    preset.catalog.l_max = 2;
    preset.catalog.injected = {parity, side_only_code(spec, false)};
    preset.catalog.designs = {{slot_design(2, 1)}, {slot_design(4, 1)}};
    return preset;
}

ScenarioPreset fig4_preset(double p1, double p2) {
    check_prob(p1, "p1");
    check_prob(p2, "p2");
    ScenarioPreset preset;
    preset.name = "fig4";

    SystemSpec& spec = preset.spec;
    spec.J = 2;
    spec.alphabet_x = 8;  // (x0, x1, x2) packed as 4*x0 + 2*x1 + x2
    spec.alphabet_y = {2, 2};
    spec.alphabet_z = {2, 2};
    spec.alphabet_zt = {2, 2};
    spec.w.assign(8, std::vector<double>(16, 0.0));
    for (Symbol x = 0; x < 8; ++x) {
        const Symbol x0 = x >> 2, x1 = (x >> 1) & 1, x2 = x & 1;
        // y_j = x_{j+1}, z_1 = z_2 = x0
        spec.w[x][(static_cast<std::size_t>(x1) * 2 + x2) * 4 + (x0 * 2 + x0)] = 1.0;
    }
    spec.d1 = {hamming_table(2), hamming_table(2)};
    finalize_spec(spec);

    std::vector<double> pmf(8);
    for (Symbol x = 0; x < 8; ++x) {
        const Symbol x0 = x >> 2, x1 = (x >> 1) & 1, x2 = x & 1;
        pmf[x] = 0.5 * bsc(p1, x0, x1) * bsc(p2, x0, x2);
    }
    preset.source = iid_source(pmf);
    preset.codec = make_codec_config(spec, 1.0, 0.3, {0.0, 0.0}, 2);

    std::vector<std::uint32_t> send_x0(8);
    for (Symbol x = 0; x < 8; ++x) send_x0[x] = static_cast<std::uint32_t>(x >> 2);

    preset.catalog.mode = CatalogConfig::Mode::design;
    preset.catalog.l_max = 2;
    preset.catalog.injected = {message_code(spec, std::move(send_x0), 2),
                               side_only_code(spec, false)};
    preset.catalog.designs = {{slot_design(2, 1)}, {slot_design(4, 1)}};
    return preset;
}

TrialSet run_trials(const SystemSpec& spec, const SourceModel& source,
                    const CodecConfig& config, const CodeCatalog& catalog,
                    std::uint64_t n, std::uint64_t trials, std::uint64_t master_seed,
                    bool parallel) {
    if (trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
    effective_window(n, config, catalog);  // surface config mismatches up front
    TrialSet set;
    set.reports.resize(trials);

    auto one_trial = [&](std::uint64_t t) {
        Rng source_rng(derived_seed(master_seed, 2 * t));
        Rng channel_rng(derived_seed(master_seed, 2 * t + 1));
        const std::vector<Symbol> x = sample_source(source, n, source_rng);
        auto [bits, plan] = encode(x, spec, config, catalog);
        const ChannelDraw draw = sample_channel(spec, x, channel_rng);

        TrialReport r;
        r.n = n;
        r.seed = derived_seed(master_seed, 2 * t);
        r.bits = bits.size_bits();
        r.rate = static_cast<double>(r.bits) / static_cast<double>(n);
        r.error_declared = plan.error_declared;
        r.l = plan.l;
        r.s = plan.s;
        r.code_index = plan.code_index;
        r.realized_distortion.resize(spec.J);
        r.exact_distortion.resize(spec.J);
        for (int j = 0; j < spec.J; ++j) {
            const std::vector<Symbol> zt = decode(bits, j, draw.y[j], n, spec, config, catalog);
            r.realized_distortion[j] = block_distortion(spec, j, zt, draw.z[j]);
            r.exact_distortion[j] = exact_conditional_distortion(x, plan, spec, config, catalog, j);
        }
        set.reports[t] = std::move(r);
    };

    // exceptions may not escape the parallel region; carry the first one out
    std::exception_ptr error;
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
            try {
                one_trial(static_cast<std::uint64_t>(t));
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
    } else {
        for (std::uint64_t t = 0; t < trials; ++t) one_trial(t);
    }
    if (error) std::rethrow_exception(error);

    // deterministic fold in trial order
    TrialAggregate& agg = set.aggregate;
    agg.trials = trials;
    agg.mean_distortion.assign(spec.J, 0.0);
    agg.distortion_ci.assign(spec.J, 0.0);
    double rate_sum = 0.0, rate_sq = 0.0;
    std::vector<double> dist_sum(spec.J, 0.0), dist_sq(spec.J, 0.0);
    std::uint64_t errors = 0;
    for (const TrialReport& r : set.reports) {
        rate_sum += r.rate;
        rate_sq += r.rate * r.rate;
        for (int j = 0; j < spec.J; ++j) {
            dist_sum[j] += r.realized_distortion[j];
            dist_sq[j] += r.realized_distortion[j] * r.realized_distortion[j];
        }
        if (r.error_declared) ++errors;
    }
    const double T = static_cast<double>(trials);
    auto half_width = [T](double sum, double sq) {
        if (T < 2) return 0.0;
        double var = std::max(0.0, (sq - sum * sum / T) / (T - 1.0));
        return 1.96 * std::sqrt(var / T);
    };
    agg.mean_rate = rate_sum / T;
    agg.rate_ci = half_width(rate_sum, rate_sq);
    for (int j = 0; j < spec.J; ++j) {
        agg.mean_distortion[j] = dist_sum[j] / T;
        agg.distortion_ci[j] = half_width(dist_sum[j], dist_sq[j]);
    }
    agg.error_fraction = static_cast<double>(errors) / T;
    return set;
}

std::optional<double> exact_error_probability(const SystemSpec& spec, const SourceModel& source,
                                              const CodecConfig& config, const CodeCatalog& catalog,
                                              std::uint64_t n) {
    if (source.kind != SourceModel::Kind::iid || source.nx != 2) return std::nullopt;
    if (effective_window(n, config, catalog) != 1) return std::nullopt;
    const CatalogSlot& slot = catalog.slot(1);
    if (slot.codes.size() != 1) return std::nullopt;

    // The scan reduces to one candidate whose block average is a function of
    // the ones count K ~ Binomial(n, p). Mirror the scan's arithmetic exactly
    // so boundary counts classify identically.
    const DistortionTable& table = slot.tables[0];
    const double p = source.pmf[1];
    const double margin = 4.0 * spec.J * config.epsilon;

    auto fails = [&](std::uint64_t K) {
        for (int j = 0; j < spec.J; ++j) {
            double acc = 0.0;
            if (n - K != 0) acc += static_cast<double>(n - K) * table.value[j][0];
            if (K != 0) acc += static_cast<double>(K) * table.value[j][1];
            if (acc / static_cast<double>(n) > config.Delta[j] + margin) return true;
        }
        return false;
    };

    double prob = 0.0;
    const double logp = p > 0.0 ? std::log(p) : 0.0;
    const double logq = p < 1.0 ? std::log(1.0 - p) : 0.0;
    for (std::uint64_t K = 0; K <= n; ++K) {
        if (!fails(K)) continue;
        if ((p == 0.0 && K > 0) || (p == 1.0 && K < n)) continue;
        const double nd = static_cast<double>(n), Kd = static_cast<double>(K);
        double logpmf = std::lgamma(nd + 1.0) - std::lgamma(Kd + 1.0) - std::lgamma(nd - Kd + 1.0);
        if (p > 0.0) logpmf += Kd * logp;
        if (p < 1.0) logpmf += (nd - Kd) * logq;
        prob += std::exp(logpmf);
    }
    return std::min(prob, 1.0);
}

GoodSetReport estimate_good_set_probability(const SystemSpec& spec, const SourceModel& source,
                                            const CodecConfig& config, const CodeCatalog& catalog,
                                            std::span<const std::uint64_t> n_grid,
                                            std::uint64_t trials, std::uint64_t master_seed,
                                            bool parallel) {
    GoodSetReport report;
    report.epsilon = config.epsilon;

    // premise: some catalog code already meets every target within epsilon in
    // expectation under the (experimenter-known) source block law
    for (int l = 1, lmax = catalog.max_l(); l <= lmax && !report.premise_ok; ++l) {
        const std::vector<double> pmf = block_pmf(source, l);
        const CatalogSlot& slot = catalog.slots[l - 1];
        for (std::uint32_t idx = 0; idx < slot.codes.size(); ++idx) {
            bool ok = true;
            for (int j = 0; j < spec.J && ok; ++j) {
                double acc = 0.0;
                for (std::size_t a = 0; a < pmf.size(); ++a)
                    if (pmf[a] > 0.0) acc += pmf[a] * slot.tables[idx].value[j][a];
                ok = acc <= config.Delta[j] + config.epsilon;
            }
            if (ok) {
                report.premise_ok = true;
                report.designated_l = l;
                report.designated_index = idx;
                report.excess.resize(spec.J);
                for (int j = 0; j < spec.J; ++j) {
                    const auto& bd = slot.tables[idx].value[j];
                    report.excess[j].resize(bd.size());
                    for (std::size_t a = 0; a < bd.size(); ++a)
                        report.excess[j][a] = bd[a] - config.Delta[j] - config.epsilon;
                }
                break;
            }
        }
    }

    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::uint64_t n = n_grid[gi];
        effective_window(n, config, catalog);
        const std::uint64_t point_seed = derived_seed(master_seed, gi);
        std::vector<std::uint8_t> failed(trials, 0);

        auto one = [&](std::uint64_t t) {
            Rng rng(derived_seed(point_seed, t));
            const std::vector<Symbol> x = sample_source(source, n, rng);
            failed[t] = select_plan(x, spec, config, catalog).error_declared ? 1 : 0;
        };
        std::exception_ptr error;
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
                try {
                    one(static_cast<std::uint64_t>(t));
                } catch (...) {
#pragma omp critical
                    if (!error) error = std::current_exception();
                }
            }
        } else {
            for (std::uint64_t t = 0; t < trials; ++t) one(t);
        }
        if (error) std::rethrow_exception(error);

        GoodSetPoint point;
        point.n = n;
        point.trials = trials;
        for (std::uint8_t f : failed) point.errors += f;
        point.fraction = static_cast<double>(point.errors) / static_cast<double>(trials);
        point.oracle = exact_error_probability(spec, source, config, catalog, n);
        report.points.push_back(point);
    }
    return report;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void export_trials_csv(std::ostream& os, const std::string& scenario, const TrialSet& set) {
    const int J = set.reports.empty() ? 0
                                      : static_cast<int>(set.reports[0].realized_distortion.size());
    os << "scenario,n,seed,rate";
    for (int j = 1; j <= J; ++j)
        os << ",realized_distortion_" << j << ",exact_distortion_" << j;
    os << ",error_declared,l,s,code_index\n";
    for (const TrialReport& r : set.reports) {
        os << scenario << "," << r.n << "," << r.seed << "," << fmt_double(r.rate);
        for (int j = 0; j < J; ++j)
            os << "," << fmt_double(r.realized_distortion[j]) << ","
               << fmt_double(r.exact_distortion[j]);
        os << "," << (r.error_declared ? 1 : 0) << "," << r.l << "," << r.s << ","
           << r.code_index << "\n";
    }
}

void export_goodset_csv(std::ostream& os, const std::string& scenario,
                        const GoodSetReport& report) {
    os << "scenario,n,trials,errors,fraction,oracle,epsilon\n";
    for (const GoodSetPoint& p : report.points) {
        os << scenario << "," << p.n << "," << p.trials << "," << p.errors << ","
           << fmt_double(p.fraction) << ",";
        if (p.oracle) os << fmt_double(*p.oracle);
        os << "," << fmt_double(report.epsilon) << "\n";
    }
}

} // namespace umc
