#pragma once

#include "herdsim/config.hpp"
#include "herdsim/experiments.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace herdsim {

/// Write-temp-then-rename; the destination is never observed half-written.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

/// Doubles are serialized with 17 significant digits so every value
/// round-trips losslessly through the CSV files.
std::string format_double(double value);

/// Provenance line placed above every CSV header row:
/// "# seed=<s> substream=<id> config_hash=<hex>".
std::string provenance_line(std::uint64_t seed, std::uint64_t substream,
                            const std::string& hash);

void write_prices_csv(const std::filesystem::path& path, const SimulationOutput& output,
                      const std::string& hash);
void write_daily_returns_csv(const std::filesystem::path& path, const SimulationOutput& output,
                             const std::string& hash);
void write_density_csv(const std::filesystem::path& path, const DensitySnapshot& snapshot,
                       std::uint64_t seed, std::uint64_t substream, const std::string& hash);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep,
                     const std::string& hash);

/// Contents of prices.csv, parsed back with full precision. Throws with the
/// offending column or row named on any format mismatch.
struct PricesData {
    std::vector<std::uint64_t> step;
    std::vector<double> model_log_price;
    std::vector<double> baseline_log_price;
    std::vector<double> sigma;
    std::vector<std::uint32_t> switches;
};
PricesData read_prices_csv(const std::filesystem::path& path);

/// The statistics block of summary.json, computed identically by the
/// simulate and analyze commands.
nlohmann::json summarize_series(const std::vector<double>& model_log_price,
                                const std::vector<double>& baseline_log_price,
                                const std::vector<double>& sigma,
                                const std::vector<std::uint32_t>& switches,
                                const RunConfig& config);

}  // namespace herdsim
