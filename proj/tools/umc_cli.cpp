#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umc/config.hpp"

namespace {

using namespace umc;

struct LoadedSetup {
    ExperimentSetup setup;
    CodeCatalog catalog;
};

LoadedSetup load_and_build(const std::string& config_path) {
    LoadedSetup ls;
    ls.setup = load_setup(config_path);
    ls.catalog = build_catalog(ls.setup.spec, ls.setup.codec.budget(), ls.setup.catalog_config);
    return ls;
}

std::vector<std::uint64_t> parse_grid(const std::string& grid) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stoull(item));
    }
    if (values.empty()) throw CLI::ValidationError("--n-grid", "empty grid");
    return values;
}

int cmd_scenario_list() {
    for (const std::string& name : scenario_names())
        std::cout << name << "\n    " << scenario_summary(name) << "\n";
    return 0;
}

int cmd_catalog_build(const std::string& config_path, const std::string& out) {
    LoadedSetup ls = load_and_build(config_path);
    std::uint64_t total = 0;
    for (const CatalogSlot& slot : ls.catalog.slots) {
        std::cout << "slot l=" << slot.l << ": " << slot.codes.size() << " codes, index width "
                  << slot.index_bits << " bits\n";
        total += slot.codes.size();
    }
    std::cout << "rate horizon n0 = " << rate_horizon_n0(ls.setup.codec, ls.catalog) << "\n";
    if (!out.empty()) {
        std::vector<BlockCode> all;
        for (const CatalogSlot& slot : ls.catalog.slots)
            all.insert(all.end(), slot.codes.begin(), slot.codes.end());
        write_code_file(out, all);
        std::cout << "wrote " << total << " codes to " << out << "\n";
    }
    return 0;
}

int cmd_encode(const std::string& config_path, std::uint64_t n, std::uint64_t seed,
               const std::string& input, const std::string& bits_out,
               const std::string& emit_x, const std::string& emit_side,
               const std::string& emit_target, std::uint64_t channel_seed) {
    LoadedSetup ls = load_and_build(config_path);

    std::vector<Symbol> x;
    if (!input.empty()) {
        auto seqs = read_sequences(input);
        if (seqs.size() != 1)
            throw std::runtime_error("--input expects exactly one sequence line");
        x = std::move(seqs[0]);
    } else {
        Rng rng(derived_seed(seed, 0));
        x = sample_source(ls.setup.source, n, rng);
    }

    auto [bits, plan] = encode(x, ls.setup.spec, ls.setup.codec, ls.catalog);
    write_bitstream_file(bits_out, x.size(), bits);

    std::cout << "n " << x.size() << "\nbits " << bits.size_bits() << "\nrate "
              << static_cast<double>(bits.size_bits()) / static_cast<double>(x.size())
              << "\nplan l=" << plan.l << " s=" << plan.s << " code=" << plan.code_index
              << (plan.error_declared ? " (error declared)" : "") << "\n";
    for (int j = 0; j < ls.setup.spec.J; ++j)
        std::cout << "exact conditional distortion " << (j + 1) << ": "
                  << exact_conditional_distortion(x, plan, ls.setup.spec, ls.setup.codec,
                                                  ls.catalog, j)
                  << "\n";

    if (!emit_x.empty()) write_sequences(emit_x, {x});
    if (!emit_side.empty() || !emit_target.empty()) {
        Rng rng(derived_seed(channel_seed ? channel_seed : seed, 1));
        ChannelDraw draw = sample_channel(ls.setup.spec, x, rng);
        if (!emit_side.empty()) write_sequences(emit_side, draw.y);
        if (!emit_target.empty()) write_sequences(emit_target, draw.z);
    }
    return 0;
}

int cmd_decode(const std::string& config_path, int decoder, const std::string& bits_path,
               const std::string& side_path, const std::string& out) {
    LoadedSetup ls = load_and_build(config_path);
    const int J = ls.setup.spec.J;
    if (decoder < 1 || decoder > J)
        throw std::runtime_error("--decoder must be in 1.." + std::to_string(J));

    auto [n, bits] = read_bitstream_file(bits_path);
    auto seqs = read_sequences(side_path);
    std::vector<Symbol> y;
    if (seqs.size() == static_cast<std::size_t>(J))
        y = std::move(seqs[decoder - 1]);
    else if (seqs.size() == 1)
        y = std::move(seqs[0]);
    else
        throw std::runtime_error("side file must hold one sequence or one per decoder");

    std::vector<Symbol> zt =
        decode(bits, decoder - 1, y, n, ls.setup.spec, ls.setup.codec, ls.catalog);
    if (!out.empty()) {
        write_sequences(out, {zt});
        std::cout << "wrote " << zt.size() << " symbols to " << out << "\n";
    } else {
        for (std::size_t i = 0; i < zt.size(); ++i)
            std::cout << zt[i] << (i + 1 == zt.size() ? "\n" : " ");
    }
    return 0;
}

int cmd_trials(const std::string& config_path, std::uint64_t n, std::uint64_t trials,
               std::uint64_t seed, const std::string& csv) {
    LoadedSetup ls = load_and_build(config_path);
    TrialSet set = run_trials(ls.setup.spec, ls.setup.source, ls.setup.codec, ls.catalog, n,
                              trials, seed);
    const TrialAggregate& a = set.aggregate;
    std::cout << "trials " << a.trials << "\nmean rate " << a.mean_rate << " +- " << a.rate_ci
              << "\n";
    for (std::size_t j = 0; j < a.mean_distortion.size(); ++j)
        std::cout << "mean distortion " << (j + 1) << ": " << a.mean_distortion[j] << " +- "
                  << a.distortion_ci[j] << "\n";
    std::cout << "error fraction " << a.error_fraction << "\n";
    if (!csv.empty()) {
        std::ofstream os(csv);
        if (!os) throw std::runtime_error("cannot open for writing: " + csv);
        export_trials_csv(os, ls.setup.scenario, set);
        std::cout << "wrote " << csv << "\n";
    }
    return 0;
}

int cmd_goodset(const std::string& config_path, const std::string& grid, std::uint64_t trials,
                std::uint64_t seed, const std::string& csv) {
    LoadedSetup ls = load_and_build(config_path);
    std::vector<std::uint64_t> n_grid = parse_grid(grid);
    GoodSetReport report = estimate_good_set_probability(
        ls.setup.spec, ls.setup.source, ls.setup.codec, ls.catalog, n_grid, trials, seed);
    std::cout << "epsilon " << report.epsilon << "\npremise "
              << (report.premise_ok ? "satisfied" : "NOT satisfied");
    if (report.premise_ok)
        std::cout << " (designated code: l=" << report.designated_l << " index "
                  << report.designated_index << ")";
    std::cout << "\n";
    for (std::size_t j = 0; j < report.excess.size(); ++j) {
        const auto [lo, hi] =
            std::minmax_element(report.excess[j].begin(), report.excess[j].end());
        std::cout << "excess values, decoder " << (j + 1) << ": min " << *lo << " max " << *hi
                  << " over " << report.excess[j].size() << " words\n";
    }
    for (const GoodSetPoint& p : report.points) {
        std::cout << "n=" << p.n << " errors " << p.errors << "/" << p.trials << " fraction "
                  << p.fraction;
        if (p.oracle) std::cout << " oracle " << *p.oracle;
        std::cout << "\n";
    }
    if (!csv.empty()) {
        std::ofstream os(csv);
        if (!os) throw std::runtime_error("cannot open for writing: " + csv);
        export_goodset_csv(os, ls.setup.scenario, report);
        std::cout << "wrote " << csv << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal broadcast lossy source coding simulator"};
    app.require_subcommand(1);

    auto* scenario = app.add_subcommand("scenario", "Scenario preset utilities");
    scenario->require_subcommand(1);
    scenario->add_subcommand("list", "List scenario presets");

    std::string config_path, out, input, bits_path, side_path, csv, grid;
    std::string emit_x, emit_side, emit_target;
    std::uint64_t n = 1024, trials = 100, seed = 1, channel_seed = 0;
    int decoder = 1;

    auto* catalog_cmd = app.add_subcommand("catalog", "Catalog utilities");
    catalog_cmd->require_subcommand(1);
    auto* catalog_build = catalog_cmd->add_subcommand("build", "Build and summarize the catalog");
    catalog_build->add_option("--config", config_path, "config file")->required();
    catalog_build->add_option("--out", out, "export codes to this file");

    auto* enc = app.add_subcommand("encode", "Sample (or read) a sequence and encode it");
    enc->add_option("--config", config_path, "config file")->required();
    enc->add_option("--n", n, "sequence length (ignored with --input)");
    enc->add_option("--seed", seed, "master seed for sampling");
    enc->add_option("--input", input, "read x from this sequence file instead of sampling");
    enc->add_option("--bits", bits_path, "output bitstream file")->required();
    enc->add_option("--emit-x", emit_x, "write the encoded sequence");
    enc->add_option("--emit-side", emit_side, "draw the channel once and write side sequences");
    enc->add_option("--emit-target", emit_target, "write target sequences of the same draw");
    enc->add_option("--channel-seed", channel_seed, "seed for the channel draw");

    auto* dec = app.add_subcommand("decode", "Decode a bitstream with side information");
    dec->add_option("--config", config_path, "config file")->required();
    dec->add_option("--decoder", decoder, "decoder index (1-based)")->required();
    dec->add_option("--bits", bits_path, "bitstream file")->required();
    dec->add_option("--side", side_path, "side information sequence file")->required();
    dec->add_option("--out", out, "write the reconstruction here (default: stdout)");

    auto* tr = app.add_subcommand("trials", "Monte Carlo rate/distortion trials");
    tr->add_option("--config", config_path, "config file")->required();
    tr->add_option("--n", n, "sequence length");
    tr->add_option("--trials", trials, "trial count");
    tr->add_option("--seed", seed, "master seed");
    tr->add_option("--csv", csv, "write per-trial reports to this CSV");

    auto* gs = app.add_subcommand("goodset", "Error-declaration probability over an n grid");
    gs->add_option("--config", config_path, "config file")->required();
    gs->add_option("--n-grid", grid, "comma-separated n values")->required();
    gs->add_option("--trials", trials, "trials per grid point");
    gs->add_option("--seed", seed, "master seed");
    gs->add_option("--csv", csv, "write grid results to this CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario->parsed()) return cmd_scenario_list();
        if (catalog_build->parsed()) return cmd_catalog_build(config_path, out);
        if (enc->parsed())
            return cmd_encode(config_path, n, seed, input, bits_path, emit_x, emit_side,
                              emit_target, channel_seed);
        if (dec->parsed()) return cmd_decode(config_path, decoder, bits_path, side_path, out);
        if (tr->parsed()) return cmd_trials(config_path, n, trials, seed, csv);
        if (gs->parsed()) return cmd_goodset(config_path, grid, trials, seed, csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
