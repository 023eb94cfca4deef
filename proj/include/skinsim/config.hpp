#pragma once

// Run configuration: a strict JSON document covering sensor geometry, fitted
// coefficients, acquisition settings, topology and contact scenarios. Unknown
// keys are rejected anywhere in the document; defaults fill missing keys.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "skinsim/capmodel.hpp"
#include "skinsim/scan.hpp"
#include "skinsim/topology.hpp"

namespace skinsim {

// Invalid configuration (parse errors, unknown keys, invariant violations).
// Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters of the standard characterization battery.
struct CharacterizationParams {
    double sweep_max_n = 40.0;
    int sweep_points = 41;
    int averaging_window = 10;
    double settle_time_s = 1.5;
    long noise_samples = 1000000;
    int calibration_cycles = 10;
    double cycle_period_s = 10.0;
    double cycle_peak_n = 40.0;
    int calibration_knots = 64;
    int durability_presses = 1000;
    int probe_taxel = 0;
};

struct RunConfig {
    SensorModel model;
    ChannelSettings channel;
    SkinTopology topology;
    std::vector<ContactSpec> contacts;
    CharacterizationParams characterization;
    std::string output_dir = "out";

    // Cross-module invariants; throws ConfigError naming the field.
    void validate() const;
};

RunConfig default_run_config();

// Loads, merges over defaults and validates. Throws ConfigError with
// line/field diagnostics.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& doc);

// Full round-trippable echo of a configuration, including the fixed units
// tags. parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& config);

// Topology export for downstream visualization.
nlohmann::json topology_to_json(const SkinTopology& topo);

} // namespace skinsim
