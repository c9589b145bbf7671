#include "herdsim/commands.hpp"

#include "herdsim/experiments.hpp"
#include "herdsim/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace herdsim {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

void write_config_echo(const fs::path& dir, const RunConfig& config) {
    atomic_write_file(dir / "config.json", config_to_json(config).dump(2) + "\n");
}

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
    const fs::path dir = config.output_dir;
    const std::string hash = config_hash(config);
    write_config_echo(dir, config);

    const auto start = clock_type::now();
    const SimulationOutput output =
        run_scenario(config.model, config.seed, 0, config.horizon_years, config.snapshots,
                     config.engine);
    const double elapsed = seconds_since(start);
    const std::uint64_t steps = output.sigma.size() - 1;
    const double updates =
        static_cast<double>(steps) * static_cast<double>(config.model.num_agents);

    write_prices_csv(dir / "prices.csv", output, hash);
    write_daily_returns_csv(dir / "daily_returns.csv", output, hash);
    for (const DensitySnapshot& snapshot : output.snapshots)
        write_density_csv(dir / ("threshold_density_" + std::to_string(snapshot.step) + ".csv"),
                          snapshot, output.seed, output.substream, hash);
    const nlohmann::json summary = summarize_series(
        output.model_log_price, output.baseline_log_price, output.sigma, output.switches, config);
    atomic_write_file(dir / "summary.json", summary.dump(2) + "\n");

    std::printf("simulate: %llu steps, %u agents, %llu switches in %.2f s (%.1f M agent-updates/s)\n",
                static_cast<unsigned long long>(steps), config.model.num_agents,
                static_cast<unsigned long long>(output.total_switches), elapsed,
                updates / elapsed / 1e6);
    std::printf("simulate: wrote %s\n", (dir / "summary.json").string().c_str());
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    const fs::path dir = config.output_dir;
    const std::string hash = config_hash(config);
    write_config_echo(dir, config);

    const auto start = clock_type::now();
    const SweepResult sweep =
        bifurcation_sweep(config.model, config.cmax_values, config.runs_per_point,
                          config.horizon_years, config.window_years, config.seed, Engine::serial);
    const double elapsed = seconds_since(start);

    write_sweep_csv(dir / "sweep.csv", sweep, hash);
    std::printf("sweep: %zu points x %u runs in %.2f s\n", sweep.points.size(),
                config.runs_per_point, elapsed);
    for (const SweepPoint& point : sweep.points)
        std::printf("  c_max=%-7g mean max|sigma|=%.4f\n", point.c_max,
                    point.mean_max_abs_sigma);
    std::printf("sweep: wrote %s\n", (dir / "sweep.csv").string().c_str());
    return 0;
}

int cmd_analyze(const fs::path& input, const fs::path& out_dir) {
    const fs::path in_dir = fs::is_directory(input) ? input : input.parent_path();
    const fs::path prices_path =
        fs::is_directory(input) ? input / "prices.csv" : input;

    const RunConfig config = parse_config(in_dir / "config.json");
    const PricesData data = read_prices_csv(prices_path);

    const nlohmann::json summary = summarize_series(
        data.model_log_price, data.baseline_log_price, data.sigma, data.switches, config);
    atomic_write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    std::printf("analyze: %zu rows -> %s\n", data.step.size(),
                (out_dir / "summary.json").string().c_str());
    return 0;
}

}  // namespace herdsim
