#pragma once

#include "herdsim/experiments.hpp"
#include "herdsim/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace herdsim {

/// Fully resolved run configuration: the model calibration plus experiment
/// and output settings. JSON keys match field names; unknown keys are
/// rejected, missing keys take the defaults below.
struct RunConfig {
    ModelParams model;
    double horizon_years = 40.0;
    double window_years = 30.0;
    std::vector<double> cmax_values = {0.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0};
    std::uint32_t runs_per_point = 10;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    SnapshotRequest snapshots;  // config key "snapshot_times": [years...] or "auto"
    std::uint32_t acf_max_lag = 50;
    double tail_fraction = 0.05;
    std::uint32_t density_bins = 100;
    Engine engine = Engine::parallel;

    void validate() const;
};

/// Parse and validate a config file. Errors name the offending key.
RunConfig parse_config(const std::filesystem::path& path);

/// Parse from an already-loaded JSON document.
RunConfig config_from_json(const nlohmann::json& doc);

/// Fully resolved echo; round-trips through config_from_json exactly.
nlohmann::json config_to_json(const RunConfig& config);

/// FNV-1a 64-bit hash of the canonical serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace herdsim
