#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wspice/bench.hpp"

namespace wspice {

/// Fully resolved experiment description shared by every CLI subcommand.
///
/// The JSON form is a flat object whose keys match the CLI flags; unknown keys
/// are rejected. When `model` is pmcw, dimensions, SNR and threshold default to
/// the 31-chip, 64-period scenario instead of the LFMCW ones.
struct RunConfig {
    ScenarioConfig scenario;
    std::vector<double> snr_db{20.0};
    std::vector<std::string> algorithms{"1bslim"};
    OneBitConfig estimator;
    std::vector<std::uint64_t> seeds;
    int jobs = 1;
    std::filesystem::path output_dir = "out";
    /// csv or bin, for the complex data files written by simulate and quantize.
    std::string data_format = "csv";
    bool images = true;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
    BenchConfig bench() const;
};

RunConfig parse_run_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

/// Names of every accepted key, in serialization order.
const std::vector<std::string>& run_config_keys();

}  // namespace wspice
