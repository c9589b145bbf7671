#pragma once

#include "herdsim/model.hpp"
#include "herdsim/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace herdsim {

inline constexpr double kTradingDaysPerYear = 250.0;

/// Steps corresponding to a span of years under the fixed trading calendar.
std::uint64_t steps_for_years(double years, std::uint32_t steps_per_day);

/// When and how to capture threshold-density snapshots during a run.
/// `auto_pick` takes one snapshot at the first step in the second half of the
/// run where |sigma| < 0.05 (a near-balanced market).
struct SnapshotRequest {
    enum class Mode { none, at_times, auto_pick };
    Mode mode = Mode::none;
    std::vector<double> times_years;  // used by at_times
    std::uint32_t bins = 100;

    static SnapshotRequest none() { return {}; }
    static SnapshotRequest at(std::vector<double> years, std::uint32_t bins = 100) {
        return {Mode::at_times, std::move(years), bins};
    }
    static SnapshotRequest automatic(std::uint32_t bins = 100) {
        return {Mode::auto_pick, {}, bins};
    }
};

struct DensitySnapshot {
    std::uint64_t step = 0;
    ThresholdDensity density;
};

/// Full record of one simulation run plus the shared-noise GBM baseline.
/// All per-step series have length steps + 1, index 0 being the initial
/// state (switches[0] == 0). The baseline consumes the identical eta draws,
/// so with kappa = 0 and alpha = 0 the two log-price series coincide.
struct SimulationOutput {
    std::vector<double> model_log_price;
    std::vector<double> baseline_log_price;
    std::vector<double> sigma;
    std::vector<std::uint32_t> switches;
    std::vector<DensitySnapshot> snapshots;
    ModelParams params;
    std::uint64_t seed = 0;
    std::uint64_t substream = 0;
    std::uint64_t total_switches = 0;
};

SimulationOutput run_scenario(const ModelParams& params, std::uint64_t seed,
                              std::uint64_t substream, double horizon_years,
                              const SnapshotRequest& snapshots = SnapshotRequest::none(),
                              Engine engine = Engine::parallel);

/// Maximum |sigma| over the trailing window: the last
/// steps_for_years(window_years) recorded steps. Throws if the window is
/// longer than the simulated horizon.
double max_abs_sigma(const SimulationOutput& output, double window_years);

struct SweepPoint {
    double c_max = 0.0;
    std::vector<double> run_values;      // per-run max|sigma| over the window
    std::vector<std::uint64_t> substreams;
    double mean_max_abs_sigma = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    ModelParams base;  // herding bounds/initial sigma as overridden per point
    double horizon_years = 0.0;
    double window_years = 0.0;
    std::uint32_t runs_per_point = 0;
    std::uint64_t seed = 0;
};

/// Herding-strength sweep. For each c_max, the herding coefficients are
/// drawn from [c_max/4, c_max] and the initial sentiment is set to 0.05 to
/// disturb the balanced start; runs_per_point independent runs (substream =
/// point*runs_per_point + run) are reduced to max|sigma| over the trailing
/// window and averaged. Runs execute in parallel over a fixed substream
/// grid, so the result is independent of worker count.
SweepResult bifurcation_sweep(const ModelParams& base, std::span<const double> cmax_values,
                              std::uint32_t runs_per_point, double horizon_years,
                              double window_years, std::uint64_t seed,
                              Engine engine = Engine::serial);

}  // namespace herdsim
