#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "umc/experiments.hpp"

namespace umc {

// Fully resolved experiment description loaded from a JSON config file.
// Schema is documented in the README; presets provide defaults and any field
// can be overridden.
struct ExperimentSetup {
    std::string scenario;
    SystemSpec spec;
    SourceModel source;
    CodecConfig codec;
    CatalogConfig catalog_config;
};

ExperimentSetup load_setup(const std::filesystem::path& config_path);
ExperimentSetup setup_from_json_text(const std::string& text,
                                     const std::filesystem::path& base_dir = {});

// Whitespace-separated symbol sequences, one per line.
std::vector<std::vector<Symbol>> read_sequences(const std::filesystem::path& path);
void write_sequences(const std::filesystem::path& path,
                     const std::vector<std::vector<Symbol>>& seqs);

std::vector<BlockCode> read_code_file(const std::filesystem::path& path);
void write_code_file(const std::filesystem::path& path, std::span<const BlockCode> codes);

} // namespace umc
