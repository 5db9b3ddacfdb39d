#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "umc/universal.hpp"

namespace umc {

// A ready-to-run scenario: system, source, codec operating point, and the
// catalog recipe. Presets cover the standard special cases; "custom" comes
// from a config file.
struct ScenarioPreset {
    std::string name;
    SystemSpec spec;
    SourceModel source;
    CodecConfig codec;
    CatalogConfig catalog;
};

std::vector<std::string> scenario_names();
std::string scenario_summary(const std::string& name);

// Rate-distortion with side information at the decoder: J=1, Z=X, side
// information through a binary symmetric channel with crossover p_side.
ScenarioPreset wyner_ziv_preset(double p_side);

// Side information that may be absent: J=2, decoder 0 sees nothing (singleton
// side alphabet), decoder 1 sees X through BSC(p_side), both estimate X.
ScenarioPreset si_maybe_absent_preset(double p_side);

// Complementary delivery: X = (X1, X2) a doubly symmetric binary pair with
// flip probability rho; decoder 0 knows X2 and wants X1, decoder 1 the
// reverse.
ScenarioPreset complementary_delivery_preset(double rho);

// Three-component source (X0, X1, X2) with X_i = X0 xor Bern(p_i); decoder j
// sees X_{j+1} and estimates X0.
ScenarioPreset fig4_preset(double p1, double p2);

// One encoded transmission: sampled source, channel draw, decode at every
// decoder.
struct TrialReport {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t bits = 0;
    double rate = 0.0;
    std::vector<double> realized_distortion;  // against the drawn targets
    std::vector<double> exact_distortion;     // exact conditional expectation given x^n
    bool error_declared = false;
    int l = 1, s = 0;
    std::uint32_t code_index = 0;
};

struct TrialAggregate {
    std::uint64_t trials = 0;
    double mean_rate = 0.0;
    double rate_ci = 0.0;  // 95% normal half-width
    std::vector<double> mean_distortion;
    std::vector<double> distortion_ci;
    double error_fraction = 0.0;
};

struct TrialSet {
    std::vector<TrialReport> reports;
    TrialAggregate aggregate;
};

// Independent trials with per-trial derived seeds (derived_seed(master, 2t)
// drives the source, derived_seed(master, 2t+1) the channel). Trials are
// embarrassingly parallel; reports are assembled by trial index and the
// aggregate is a serial fold, so parallel and serial runs agree exactly.
TrialSet run_trials(const SystemSpec& spec, const SourceModel& source,
                    const CodecConfig& config, const CodeCatalog& catalog,
                    std::uint64_t n, std::uint64_t trials, std::uint64_t master_seed,
                    bool parallel = true);

struct GoodSetPoint {
    std::uint64_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double fraction = 0.0;            // empirical error-declaration rate
    std::optional<double> oracle;     // exact value when computable
};

struct GoodSetReport {
    double epsilon = 0.0;
    bool premise_ok = false;          // some catalog code meets Delta_j + eps in expectation
    int designated_l = 0;             // that code's slot and index (when premise_ok)
    std::uint32_t designated_index = 0;
    std::vector<std::vector<double>> excess;  // per j: bd_j(a) - Delta_j - eps over X^l
    std::vector<GoodSetPoint> points;
};

// Empirical error-declaration probability across an n grid, with the exact
// closed-form value where available (binary iid source, single length-1
// catalog code: the block average is a scaled binomial count).
GoodSetReport estimate_good_set_probability(const SystemSpec& spec, const SourceModel& source,
                                            const CodecConfig& config, const CodeCatalog& catalog,
                                            std::span<const std::uint64_t> n_grid,
                                            std::uint64_t trials, std::uint64_t master_seed,
                                            bool parallel = true);

// Exact P(error declared) for the single-code binary-iid case; nullopt when
// the configuration is outside that case.
std::optional<double> exact_error_probability(const SystemSpec& spec, const SourceModel& source,
                                              const CodecConfig& config, const CodeCatalog& catalog,
                                              std::uint64_t n);

// CSV surfaces. Column orders are frozen; see README. Output is
// deterministic byte-for-byte for identical inputs.
void export_trials_csv(std::ostream& os, const std::string& scenario, const TrialSet& set);
void export_goodset_csv(std::ostream& os, const std::string& scenario, const GoodSetReport& report);

} // namespace umc
