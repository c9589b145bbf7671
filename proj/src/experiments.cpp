#include "herdsim/experiments.hpp"

#include <cmath>
#include <stdexcept>

namespace herdsim {

std::uint64_t steps_for_years(double years, std::uint32_t steps_per_day) {
    if (!(years > 0.0)) throw std::invalid_argument("horizon/window years must be positive");
    return static_cast<std::uint64_t>(
        std::llround(years * kTradingDaysPerYear * static_cast<double>(steps_per_day)));
}

SimulationOutput run_scenario(const ModelParams& params, std::uint64_t seed,
                              std::uint64_t substream, double horizon_years,
                              const SnapshotRequest& snapshots, Engine engine) {
    params.validate();
    const std::uint64_t steps = steps_for_years(horizon_years, params.steps_per_day);

    RandomStream stream(seed, substream);
    MarketState market = init_market(params, stream);

    SimulationOutput out;
    out.params = params;
    out.seed = seed;
    out.substream = substream;
    out.model_log_price.reserve(steps + 1);
    out.baseline_log_price.reserve(steps + 1);
    out.sigma.reserve(steps + 1);
    out.switches.reserve(steps + 1);
    out.model_log_price.push_back(market.log_price);
    out.baseline_log_price.push_back(market.log_price);
    out.sigma.push_back(market.sigma);
    out.switches.push_back(0);

    std::vector<std::uint64_t> snapshot_steps;
    if (snapshots.mode == SnapshotRequest::Mode::at_times) {
        for (double years : snapshots.times_years) {
            const std::uint64_t at = steps_for_years(years, params.steps_per_day);
            if (at > steps)
                throw std::invalid_argument("snapshot time lies beyond the horizon");
            snapshot_steps.push_back(at);
        }
    }
    bool auto_snapshot_pending = snapshots.mode == SnapshotRequest::Mode::auto_pick;
    const std::vector<double> edges =
        snapshots.mode == SnapshotRequest::Mode::none
            ? std::vector<double>{}
            : default_density_edges(snapshots.bins);

    double baseline_log = market.log_price;
    StepWorkspace ws;
    for (std::uint64_t n = 1; n <= steps; ++n) {
        const double eta = stream.gaussian();
        baseline_log += information_shock(eta, params.h);
        const StepOutcome step = resolve_timestep(market, eta, params, stream, ws, engine);
        out.model_log_price.push_back(market.log_price);
        out.baseline_log_price.push_back(baseline_log);
        out.sigma.push_back(market.sigma);
        out.switches.push_back(step.switch_count);
        out.total_switches += step.switch_count;

        for (std::uint64_t at : snapshot_steps)
            if (at == n) out.snapshots.push_back({n, threshold_density(market, edges)});
        if (auto_snapshot_pending && n >= steps / 2 && std::abs(market.sigma) < 0.05) {
            out.snapshots.push_back({n, threshold_density(market, edges)});
            auto_snapshot_pending = false;
        }
    }
    return out;
}

double max_abs_sigma(const SimulationOutput& output, double window_years) {
    const std::uint64_t steps = output.sigma.size() - 1;
    const std::uint64_t window = steps_for_years(window_years, output.params.steps_per_day);
    if (window > steps)
        throw std::invalid_argument("max_abs_sigma: window exceeds the simulated horizon");
    double best = 0.0;
    for (std::uint64_t n = steps - window + 1; n <= steps; ++n)
        best = std::max(best, std::abs(output.sigma[n]));
    return best;
}

SweepResult bifurcation_sweep(const ModelParams& base, std::span<const double> cmax_values,
                              std::uint32_t runs_per_point, double horizon_years,
                              double window_years, std::uint64_t seed, Engine engine) {
    if (runs_per_point < 1)
        throw std::invalid_argument("bifurcation_sweep: runs_per_point must be at least 1");
    for (double c : cmax_values)
        if (!(c >= 0.0)) throw std::invalid_argument("bifurcation_sweep: c_max must be >= 0");
    if (steps_for_years(window_years, base.steps_per_day) >
        steps_for_years(horizon_years, base.steps_per_day))
        throw std::invalid_argument("bifurcation_sweep: window exceeds horizon");

    SweepResult result;
    result.base = base;
    result.horizon_years = horizon_years;
    result.window_years = window_years;
    result.runs_per_point = runs_per_point;
    result.seed = seed;
    result.points.resize(cmax_values.size());

    const std::int64_t total =
        static_cast<std::int64_t>(cmax_values.size()) * runs_per_point;
    std::vector<double> values(static_cast<std::size_t>(total), 0.0);

    // One flat deterministic grid of (point, run) -> substream; dynamic
    // scheduling only changes who computes which cell, never its value.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t cell = 0; cell < total; ++cell) {
        const std::size_t point = static_cast<std::size_t>(cell) / runs_per_point;
        ModelParams params = base;
        params.herding_lo = cmax_values[point] / 4.0;
        params.herding_hi = cmax_values[point];
        params.initial_sigma = 0.05;
        const SimulationOutput run =
            run_scenario(params, seed, static_cast<std::uint64_t>(cell), horizon_years,
                         SnapshotRequest::none(), engine);
        values[static_cast<std::size_t>(cell)] = max_abs_sigma(run, window_years);
    }

    for (std::size_t point = 0; point < cmax_values.size(); ++point) {
        SweepPoint& sp = result.points[point];
        sp.c_max = cmax_values[point];
        double sum = 0.0;
        for (std::uint32_t r = 0; r < runs_per_point; ++r) {
            const std::size_t cell = point * runs_per_point + r;
            sp.run_values.push_back(values[cell]);
            sp.substreams.push_back(cell);
            sum += values[cell];
        }
        sp.mean_max_abs_sigma = sum / runs_per_point;
    }
    return result;
}

}  // namespace herdsim
