#include "umc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace umc {

namespace {

using nlohmann::json;

SourceModel parse_source(const json& js, int nx_hint) {
    const std::string kind = js.at("kind").get<std::string>();
    if (kind == "iid") return iid_source(js.at("pmf").get<std::vector<double>>());
    if (kind == "markov")
        return markov_source(js.at("transition").get<std::vector<std::vector<double>>>());
    if (kind == "function_of_markov") {
        int nx = js.value("alphabet_x", nx_hint);
        return function_of_markov_source(
            js.at("transition").get<std::vector<std::vector<double>>>(),
            js.at("emit").get<std::vector<Symbol>>(), nx);
    }
    throw std::invalid_argument("config: unknown source kind '" + kind + "'");
}

// Named channel: every decoder's target is X itself and its side information
// is X through an independent BSC with the given crossover (one per decoder).
std::vector<std::vector<double>> bsc_side_rows(const SystemSpec& spec,
                                               const std::vector<double>& crossover) {
    if (spec.alphabet_x != 2)
        throw std::invalid_argument("config: bsc_side needs a binary source alphabet");
    if (crossover.size() != static_cast<std::size_t>(spec.J))
        throw std::invalid_argument("config: bsc_side needs one crossover per decoder");
    for (int j = 0; j < spec.J; ++j)
        if (spec.alphabet_y[j] != 2 || spec.alphabet_z[j] != 2)
            throw std::invalid_argument("config: bsc_side needs binary decoder alphabets");
    const std::uint64_t yp = spec.y_product(), zp = spec.z_product();
    std::vector<std::vector<double>> w(2, std::vector<double>(yp * zp, 0.0));
    std::vector<Symbol> ys(spec.J), zs(spec.J);
    for (Symbol x = 0; x < 2; ++x)
        for (std::uint64_t yi = 0; yi < yp; ++yi) {
            std::uint64_t rest = yi;
            double p = 1.0;
            for (int j = spec.J - 1; j >= 0; --j) {
                ys[j] = static_cast<Symbol>(rest % 2);
                rest /= 2;
                p *= ys[j] == x ? 1.0 - crossover[j] : crossover[j];
            }
            for (int j = 0; j < spec.J; ++j) zs[j] = x;
            w[x][yi * zp + spec.pack_tuple(zs, spec.alphabet_z)] = p;
        }
    return w;
}

SystemSpec parse_system(const json& js) {
    SystemSpec spec;
    spec.J = js.at("J").get<int>();
    spec.alphabet_x = js.at("alphabet_x").get<int>();
    spec.alphabet_y = js.at("alphabet_y").get<std::vector<int>>();
    spec.alphabet_z = js.at("alphabet_z").get<std::vector<int>>();
    spec.alphabet_zt = js.at("alphabet_zt").get<std::vector<int>>();
    const json& wj = js.at("w");
    if (wj.is_object()) {
        const std::string kind = wj.at("kind").get<std::string>();
        if (kind != "bsc_side")
            throw std::invalid_argument("config: unknown channel constructor '" + kind + "'");
        spec.w = bsc_side_rows(spec, wj.at("p").get<std::vector<double>>());
    } else {
        spec.w = wj.get<std::vector<std::vector<double>>>();
    }

    const json& dist = js.at("distortion");
    if (!dist.is_array() || static_cast<int>(dist.size()) != spec.J)
        throw std::invalid_argument("config: 'distortion' needs one entry per decoder");
    spec.d1.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        if (dist[j].is_string()) {
            if (dist[j].get<std::string>() != "hamming")
                throw std::invalid_argument("config: unknown distortion name");
            if (spec.alphabet_zt[j] != spec.alphabet_z[j])
                throw std::invalid_argument(
                    "config: hamming distortion needs matching alphabets");
            const int nz = spec.alphabet_z[j];
            spec.d1[j].assign(static_cast<std::size_t>(nz) * nz, 1.0);
            for (int i = 0; i < nz; ++i) spec.d1[j][static_cast<std::size_t>(i) * nz + i] = 0.0;
        } else {
            // nested [zt][z] rows
            auto rows = dist[j].get<std::vector<std::vector<double>>>();
            for (const auto& row : rows)
                spec.d1[j].insert(spec.d1[j].end(), row.begin(), row.end());
        }
    }
    if (js.contains("d_max")) spec.d_max = js.at("d_max").get<std::vector<double>>();
    finalize_spec(spec);
    return spec;
}

DesignParams parse_design(const json& js, int l, int nx) {
    DesignParams d;
    d.M = js.value("M", 0u);
    d.seed = js.value("seed", std::uint64_t{1});
    d.iterations = js.value("iterations", 40);
    if (js.contains("weights")) d.weights = js.at("weights").get<std::vector<double>>();
    if (js.contains("pmf")) {
        const json& pj = js.at("pmf");
        if (pj.is_string()) {
            if (pj.get<std::string>() != "uniform")
                throw std::invalid_argument("config: unknown design pmf name");
        } else if (pj.is_array()) {
            // explicit pmf over X^l, packed-word order
            d.training_pmf = pj.get<std::vector<double>>();
            const std::uint64_t words =
                checked_pow(static_cast<std::uint64_t>(nx), static_cast<std::uint64_t>(l));
            if (d.training_pmf.size() != words)
                throw std::invalid_argument("config: design pmf must cover all words");
        } else if (pj.is_object() && pj.contains("iid")) {
            auto letter = pj.at("iid").get<std::vector<double>>();
            if (static_cast<int>(letter.size()) != nx)
                throw std::invalid_argument("config: design pmf letter size mismatch");
            const std::uint64_t words =
                checked_pow(static_cast<std::uint64_t>(nx), static_cast<std::uint64_t>(l));
            d.training_pmf.resize(words);
            std::vector<Symbol> a(l);
            for (std::uint64_t idx = 0; idx < words; ++idx) {
                unpack_word(idx, nx, l, a);
                double p = 1.0;
                for (Symbol s : a) p *= letter[s];
                d.training_pmf[idx] = p;
            }
        } else {
            throw std::invalid_argument("config: bad design pmf");
        }
    }
    return d;
}

CatalogConfig parse_catalog(const json& js, const SystemSpec& spec,
                            const std::filesystem::path& base_dir) {
    CatalogConfig cat;
    const std::string mode = js.value("mode", std::string("design"));
    if (mode == "design")
        cat.mode = CatalogConfig::Mode::design;
    else if (mode == "enumerate")
        cat.mode = CatalogConfig::Mode::enumerate_all;
    else
        throw std::invalid_argument("config: unknown catalog mode '" + mode + "'");
    cat.l_max = js.value("l_max", 1);
    cat.limit = js.value("limit", std::uint64_t{2'000'000});
    if (js.contains("inject")) {
        for (const auto& entry : js.at("inject")) {
            std::filesystem::path p = entry.get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            auto codes = read_code_file(p);
            cat.injected.insert(cat.injected.end(), codes.begin(), codes.end());
        }
    }
    if (js.contains("designs")) {
        const json& dj = js.at("designs");
        if (!dj.is_array())
            throw std::invalid_argument("config: 'designs' must be an array per block length");
        for (std::size_t li = 0; li < dj.size(); ++li) {
            std::vector<DesignParams> slot;
            for (const auto& entry : dj[li])
                slot.push_back(parse_design(entry, static_cast<int>(li) + 1, spec.alphabet_x));
            cat.designs.push_back(std::move(slot));
        }
    }
    return cat;
}

} // namespace

ExperimentSetup setup_from_json_text(const std::string& text,
                                     const std::filesystem::path& base_dir) {
    json js = json::parse(text, nullptr, true, /*allow comments*/ true);

    if (!js.contains("scenario") || !js.at("scenario").contains("name"))
        throw std::invalid_argument("config: missing scenario.name");
    const json& sc = js.at("scenario");
    const std::string name = sc.at("name").get<std::string>();

    ExperimentSetup setup;
    setup.scenario = name;

    if (name == "custom") {
        if (!js.contains("system") || !js.contains("source") || !js.contains("codec"))
            throw std::invalid_argument(
                "config: custom scenario needs 'system', 'source', and 'codec'");
        setup.spec = parse_system(js.at("system"));
        setup.source = parse_source(js.at("source"), setup.spec.alphabet_x);
    } else {
        ScenarioPreset preset;
        if (name == "wyner_ziv")
            preset = wyner_ziv_preset(sc.value("p_side", 0.1));
        else if (name == "si_maybe_absent")
            preset = si_maybe_absent_preset(sc.value("p_side", 0.1));
        else if (name == "complementary_delivery")
            preset = complementary_delivery_preset(sc.value("rho", 0.1));
        else if (name == "fig4")
            preset = fig4_preset(sc.value("p1", 0.1), sc.value("p2", 0.2));
        else
            throw std::invalid_argument("config: unknown scenario '" + name + "'");
        setup.spec = std::move(preset.spec);
        setup.source = std::move(preset.source);
        setup.codec = std::move(preset.codec);
        setup.catalog_config = std::move(preset.catalog);
        if (js.contains("source")) setup.source = parse_source(js.at("source"), setup.spec.alphabet_x);
    }

    if (js.contains("codec") || name == "custom") {
        const json& cj = js.at("codec");
        setup.codec = make_codec_config(setup.spec, cj.at("R").get<double>(),
                                        cj.at("delta").get<double>(),
                                        cj.at("Delta").get<std::vector<double>>(),
                                        cj.value("l_cap", 0));
    }
    if (js.contains("catalog") || name == "custom") {
        if (!js.contains("catalog"))
            throw std::invalid_argument("config: custom scenario needs 'catalog'");
        setup.catalog_config = parse_catalog(js.at("catalog"), setup.spec, base_dir);
    }
    if (setup.codec.l_cap <= 0) setup.codec.l_cap = setup.catalog_config.l_max;

    if (setup.source.nx != setup.spec.alphabet_x)
        throw std::invalid_argument("config: source alphabet does not match the system");
    return setup;
}

ExperimentSetup load_setup(const std::filesystem::path& config_path) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config: " + config_path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return setup_from_json_text(buf.str(), config_path.parent_path());
}

std::vector<std::vector<Symbol>> read_sequences(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open sequence file: " + path.string());
    std::vector<std::vector<Symbol>> seqs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<Symbol> seq;
        Symbol s;
        while (ls >> s) seq.push_back(s);
        seqs.push_back(std::move(seq));
    }
    return seqs;
}

void write_sequences(const std::filesystem::path& path,
                     const std::vector<std::vector<Symbol>>& seqs) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    for (const auto& seq : seqs) {
        for (std::size_t i = 0; i < seq.size(); ++i)
            os << seq[i] << (i + 1 == seq.size() ? "" : " ");
        os << "\n";
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<BlockCode> read_code_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open code file: " + path.string());
    return read_codes(is);
}

void write_code_file(const std::filesystem::path& path, std::span<const BlockCode> codes) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_codes(os, codes);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

} // namespace umc
