#pragma once

#include "herdsim/config.hpp"

#include <filesystem>

namespace herdsim {

/// Run one simulation and write config.json, prices.csv, daily_returns.csv,
/// summary.json and any threshold_density_<step>.csv into the output
/// directory. Returns the process exit code.
int cmd_simulate(const RunConfig& config);

/// Run the herding-strength sweep and write config.json and sweep.csv.
int cmd_sweep(const RunConfig& config);

/// Recompute summary.json from a stored run (directory holding prices.csv
/// and config.json) into out_dir. The statistical fields match the original
/// run's summary bit for bit.
int cmd_analyze(const std::filesystem::path& input, const std::filesystem::path& out_dir);

}  // namespace herdsim
