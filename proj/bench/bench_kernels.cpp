// Times the OpenMP kernels against their serial reference implementations and
// verifies that both produce identical results. Three kernels dominate the
// runtime of real experiments: catalog table precomputation, the encoder's
// plan scan, and Monte Carlo trials.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "umc/experiments.hpp"

using namespace umc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SystemSpec synthetic_spec() {
    SystemSpec spec;
    spec.J = 2;
    spec.alphabet_x = 4;
    spec.alphabet_y = {4, 4};
    spec.alphabet_z = {4, 4};
    spec.alphabet_zt = {4, 4};
    const std::uint64_t row = spec.y_product() * spec.z_product();
    Rng rng(1);
    for (int x = 0; x < 4; ++x) {
        std::vector<double> r(row);
        double sum = 0.0;
        for (double& v : r) {
            v = 0.05 + rng.uniform01();
            sum += v;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
            r[i] /= sum;
            acc += r[i];
        }
        r.back() = 1.0 - acc;
        spec.w.push_back(std::move(r));
    }
    std::vector<double> ham(16, 1.0);
    for (int i = 0; i < 4; ++i) ham[i * 4 + i] = 0.0;
    spec.d1 = {ham, ham};
    finalize_spec(spec);
    return spec;
}

BlockCode random_code(Rng& rng, const SystemSpec& spec, int l, std::uint32_t M) {
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

// random tables make a heavy, design-free workload for the table kernel
CatalogConfig synthetic_catalog_config(const SystemSpec& spec) {
    CatalogConfig config;
    config.mode = CatalogConfig::Mode::design;
    config.l_max = 4;
    config.designs.assign(4, {});
    Rng rng(9);
    for (int l = 1; l <= 4; ++l) {
        const int count = l == 4 ? 192 : 8;
        const std::uint32_t M = l >= 3 ? 8 : (l == 2 ? 4 : 2);
        for (int k = 0; k < count; ++k)
            config.injected.push_back(random_code(rng, spec, l, M));
    }
    return config;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
                serial_s, parallel_s, serial_s / parallel_s,
                identical ? "outputs identical" : "OUTPUT MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n\n");
#endif

    SystemSpec spec = synthetic_spec();
    CodecConfig config = make_codec_config(spec, 1.6, 0.5, {0.6, 0.6}, 4);
    CatalogConfig catcfg = synthetic_catalog_config(spec);

    auto t0 = std::chrono::steady_clock::now();
    CodeCatalog serial_cat = build_catalog(spec, config.budget(), catcfg, false);
    const double cat_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    CodeCatalog parallel_cat = build_catalog(spec, config.budget(), catcfg, true);
    const double cat_parallel = seconds_since(t0);
    bool same = true;
    for (int l = 1; l <= serial_cat.max_l() && same; ++l) {
        same = serial_cat.slot(l).codes == parallel_cat.slot(l).codes;
        for (std::size_t i = 0; same && i < serial_cat.slot(l).tables.size(); ++i)
            same = serial_cat.slot(l).tables[i].value == parallel_cat.slot(l).tables[i].value;
    }
    report("catalog tables", cat_serial, cat_parallel, same);

    // kernel 2: plan scan over a batch of long sequences
    SourceModel source = iid_source({0.4, 0.3, 0.2, 0.1});
    std::vector<std::vector<Symbol>> batch;
    for (int t = 0; t < 48; ++t) {
        Rng rng(derived_seed(2, t));
        batch.push_back(sample_source(source, 1 << 16, rng));
    }
    t0 = std::chrono::steady_clock::now();
    std::vector<EncodePlan> serial_plans;
    for (const auto& x : batch)
        serial_plans.push_back(select_plan_serial(x, spec, config, parallel_cat));
    const double scan_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    std::vector<EncodePlan> parallel_plans;
    for (const auto& x : batch)
        parallel_plans.push_back(select_plan(x, spec, config, parallel_cat));
    const double scan_parallel = seconds_since(t0);
    report("plan scan (48 x 64k)", scan_serial, scan_parallel,
           serial_plans == parallel_plans);

    // kernel 3: Monte Carlo trials
    ScenarioPreset preset = complementary_delivery_preset(0.1);
    CodeCatalog cd_cat = build_catalog(preset.spec, preset.codec.budget(), preset.catalog);
    t0 = std::chrono::steady_clock::now();
    TrialSet serial_trials =
        run_trials(preset.spec, preset.source, preset.codec, cd_cat, 4096, 256, 3, false);
    const double mc_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    TrialSet parallel_trials =
        run_trials(preset.spec, preset.source, preset.codec, cd_cat, 4096, 256, 3, true);
    const double mc_parallel = seconds_since(t0);
    same = serial_trials.aggregate.mean_rate == parallel_trials.aggregate.mean_rate &&
           serial_trials.aggregate.mean_distortion == parallel_trials.aggregate.mean_distortion;
    for (std::size_t t = 0; same && t < serial_trials.reports.size(); ++t)
        same = serial_trials.reports[t].bits == parallel_trials.reports[t].bits &&
               serial_trials.reports[t].realized_distortion ==
                   parallel_trials.reports[t].realized_distortion;
    report("trials (256 x n=4096)", mc_serial, mc_parallel, same);
    return 0;
}
