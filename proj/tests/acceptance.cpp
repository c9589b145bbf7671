// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier than the unit tests by design; expect several minutes of
// wall time (the full-scale run dominates).

#include "herdsim/commands.hpp"
#include "herdsim/config.hpp"
#include "herdsim/experiments.hpp"
#include "herdsim/io.hpp"
#include "herdsim/model.hpp"
#include "herdsim/stats.hpp"

#include "reference_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace herdsim;
namespace fs = std::filesystem;

namespace {

struct Checker {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool condition, const std::string& what) {
        notes.push_back(std::string(condition ? "  ok   " : "  FAIL ") + what);
        ok = ok && condition;
    }
    void info(const std::string& what) { notes.push_back("       " + what); }
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> notes;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ModelParams desk_defaults() {
    ModelParams p;  // standard calibration
    p.num_agents = 1000;
    return p;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------------------------
// Criterion 7 support: randomized micro-populations replayed against the
// straight-line reference implementation.
// --------------------------------------------------------------------------

bool micro_case_matches(std::uint64_t case_index, Engine engine, std::string& why) {
    RandomStream gen(777, 1000 + case_index);
    const std::size_t n = 1 + gen.raw() % 3;
    ModelParams p;
    p.num_agents = static_cast<std::uint32_t>(n);
    const double h_choices[] = {4e-6, 0.001, 0.01, 0.04};
    p.h = h_choices[gen.raw() % 4];
    p.kappa = gen.uniform(0.0, 0.5);
    const double alpha_choices[] = {0.0, 1.0, 2.0};
    p.alpha = alpha_choices[gen.raw() % 3];
    const double delta_choices[] = {0.0, 0.2, 1.0};
    p.delta = delta_choices[gen.raw() % 3];
    p.reset_lo = gen.uniform(0.01, 0.1);
    p.reset_hi = p.reset_lo + gen.uniform(0.0, 0.2);

    const double price = std::exp(gen.uniform(-0.5, 0.5));
    std::vector<Agent> agents(n);
    for (auto& a : agents) {
        a.state = static_cast<std::uint8_t>(gen.raw() % 2);
        a.lower = price * (1.0 - gen.uniform(0.001, 0.25));
        a.upper = price * (1.0 + gen.uniform(0.001, 0.25));
        a.weight = gen.uniform(0.5, 3.0);
        a.herding = gen.uniform(0.0, 100.0);
        a.threshold_volatility = p.delta;
    }

    MarketState market;
    market.agents = Population::from_agents(agents);
    market.price = price;
    market.log_price = std::log(price);
    market.sigma = compute_sigma(market.agents);

    refmodel::RefMarket ref;
    ref.agents = agents;
    ref.price = price;
    ref.log_price = std::log(price);
    ref.sigma = refmodel::ref_sigma(agents);

    RandomStream s_model(9000 + case_index, 0);
    RandomStream s_ref(9000 + case_index, 0);
    StepWorkspace ws;
    for (int step = 0; step < 4; ++step) {
        const double eta = gen.gaussian() * 3.0;
        const StepOutcome out = resolve_timestep(market, eta, p, s_model, ws, engine);
        const refmodel::RefOutcome want = refmodel::ref_step(ref, eta, p, s_ref);
        if (out.new_price != want.price || out.new_sigma != want.sigma ||
            out.switch_count != want.switches || out.cascade_iterations != want.iterations ||
            market.log_price != ref.log_price || s_model.tick() != s_ref.tick()) {
            why = fmt("case %llu step %d: outcome mismatch",
                      static_cast<unsigned long long>(case_index), step);
            return false;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Agent got = market.agents.agent(i);
            const Agent& exp = ref.agents[i];
            if (got.state != exp.state || got.lower != exp.lower || got.upper != exp.upper) {
                why = fmt("case %llu step %d agent %zu: state mismatch",
                          static_cast<unsigned long long>(case_index), step, i);
                return false;
            }
        }
    }
    return true;
}

}  // namespace

int main() {
    std::vector<CriterionResult> results;
    const auto suite_start = std::chrono::steady_clock::now();

    auto run_criterion = [&](int id, const std::string& name,
                             const std::function<void(Checker&)>& body) {
        std::printf("running criterion %d: %s ...\n", id, name.c_str());
        std::fflush(stdout);
        Checker check;
        try {
            body(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("unexpected exception: ") + e.what());
        }
        results.push_back({id, name, check.ok, check.notes});
    };

    // ---- 1. GBM reduction --------------------------------------------------
    run_criterion(1, "GBM reduction (kappa=0, alpha=0, 1e5 steps)", [](Checker& check) {
        ModelParams p = desk_defaults();
        p.kappa = 0.0;
        p.alpha = 0.0;
        const auto start = std::chrono::steady_clock::now();
        const SimulationOutput out = run_scenario(p, 424242, 0, 40.0);
        const double elapsed = seconds_since(start);
        double worst = 0.0;
        for (std::size_t n = 0; n < out.model_log_price.size(); ++n) {
            const double rel = std::abs(out.model_log_price[n] - out.baseline_log_price[n]) /
                               std::max(1.0, std::abs(out.baseline_log_price[n]));
            worst = std::max(worst, rel);
        }
        check.require(out.model_log_price.size() == 100001, "horizon is 1e5 steps");
        check.require(worst <= 1e-12,
                      fmt("model/baseline log-price relative gap %.3g <= 1e-12", worst));
        check.require(elapsed < 5.0, fmt("runtime %.2f s < 5 s", elapsed));
    });

    // ---- 2 + 3. calibration and stylized facts (shared runs) ---------------
    std::vector<SimulationOutput> stylized_runs;
    run_criterion(3, "stylized facts at the default calibration (5 seeds)", [&](Checker& check) {
        const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
        stylized_runs.resize(5);
        double slowest = 0.0;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < 5; ++i) {
            const auto start = std::chrono::steady_clock::now();
            stylized_runs[static_cast<std::size_t>(i)] =
                run_scenario(desk_defaults(), seeds[i], 0, 40.0);
            const double elapsed = seconds_since(start);
#pragma omp critical
            slowest = std::max(slowest, elapsed);
        }
        std::vector<double> model_kurt, base_kurt, model_acf, base_acf;
        for (const SimulationOutput& out : stylized_runs) {
            const ReturnSeries model = daily_returns(out.model_log_price, 10);
            const ReturnSeries base = daily_returns(out.baseline_log_price, 10);
            model_kurt.push_back(excess_kurtosis(model.values));
            base_kurt.push_back(excess_kurtosis(base.values));
            auto mean_of = [](const std::vector<double>& acf) {
                double m = 0.0;
                for (double v : acf) m += v;
                return m / static_cast<double>(acf.size());
            };
            model_acf.push_back(mean_of(volatility_acf(model, 50)));
            base_acf.push_back(mean_of(volatility_acf(base, 50)));
        }
        check.require(median(model_kurt) > 1.0,
                      fmt("median model excess kurtosis %.2f > 1", median(model_kurt)));
        for (std::size_t i = 0; i < base_kurt.size(); ++i)
            check.require(base_kurt[i] >= -0.5 && base_kurt[i] <= 0.5,
                          fmt("baseline excess kurtosis (seed %zu) %.3f in [-0.5, 0.5]", i + 1,
                              base_kurt[i]));
        check.require(median(model_acf) > 0.03,
                      fmt("median model volatility ACF over lags 1-50 %.4f > 0.03",
                          median(model_acf)));
        for (std::size_t i = 0; i < base_acf.size(); ++i)
            check.require(std::abs(base_acf[i]) <= 0.02,
                          fmt("baseline volatility ACF (seed %zu) %.5f within +-0.02", i + 1,
                              base_acf[i]));
        check.require(slowest < 60.0, fmt("slowest seed %.2f s < 60 s", slowest));
    });

    run_criterion(2, "baseline daily-return calibration", [&](Checker& check) {
        const SimulationOutput& out = stylized_runs.at(0);
        const ReturnSeries base = daily_returns(out.baseline_log_price, 10);
        check.require(base.values.size() >= 2500,
                      fmt("%zu simulated days >= 2500", base.values.size()));
        double mean = 0.0;
        for (double r : base.values) mean += r;
        mean /= static_cast<double>(base.values.size());
        double ss = 0.0;
        for (double r : base.values) ss += (r - mean) * (r - mean);
        const double std_daily = std::sqrt(ss / static_cast<double>(base.values.size() - 1));
        const double target = std::sqrt(10.0 * 0.000004);
        check.require(std::abs(std_daily / target - 1.0) < 0.05,
                      fmt("daily log-return std %.6f within 5%% of sqrt(10h) = %.6f", std_daily,
                          target));
    });

    // ---- 4. bifurcation transition ------------------------------------------
    SweepResult sweep_default;
    run_criterion(4, "bifurcation transition over C_max", [&](Checker& check) {
        const std::vector<double> grid = {5, 10, 20, 40, 60, 80, 100};
        sweep_default = bifurcation_sweep(desk_defaults(), grid, 10, 40.0, 30.0, 1);
        std::map<double, double> mean;
        for (const SweepPoint& point : sweep_default.points) {
            mean[point.c_max] = point.mean_max_abs_sigma;
            check.info(fmt("C_max=%-5g mean max|sigma| = %.4f", point.c_max,
                           point.mean_max_abs_sigma));
        }
        check.require(mean.at(5.0) < 0.25, fmt("mean at C_max=5 is %.4f < 0.25", mean.at(5.0)));
        check.require(mean.at(100.0) > 0.7,
                      fmt("mean at C_max=100 is %.4f > 0.7", mean.at(100.0)));
        int violations = 0;
        const double upto60[] = {mean.at(5.0), mean.at(10.0), mean.at(20.0), mean.at(40.0),
                                 mean.at(60.0)};
        for (int i = 0; i + 1 < 5; ++i)
            if (upto60[i + 1] < upto60[i]) ++violations;
        check.require(violations <= 1,
                      fmt("%d adjacent-pair violations (allow 1) in the 5..60 trend", violations));
    });

    // ---- 5. alpha = 0 variant ------------------------------------------------
    run_criterion(5, "alpha=0 variant at C_max=40", [&](Checker& check) {
        ModelParams p = desk_defaults();
        p.alpha = 0.0;
        const std::vector<double> grid = {40.0};
        const SweepResult sweep = bifurcation_sweep(p, grid, 10, 40.0, 30.0, 1);
        const double mean = sweep.points.at(0).mean_max_abs_sigma;
        check.require(mean > 0.5, fmt("mean max|sigma| at C_max=40 is %.4f > 0.5", mean));
    });

    // ---- 6. delta insensitivity ----------------------------------------------
    run_criterion(6, "delta insensitivity (delta=1 vs 0.2)", [&](Checker& check) {
        ModelParams p = desk_defaults();
        p.delta = 1.0;
        const std::vector<double> grid = {5, 10, 20, 40, 60, 80, 100};
        const SweepResult sweep = bifurcation_sweep(p, grid, 10, 40.0, 30.0, 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double a = sweep_default.points.at(i).mean_max_abs_sigma;
            const double b = sweep.points.at(i).mean_max_abs_sigma;
            check.require(std::abs(a - b) < 0.15,
                          fmt("C_max=%-5g |%.4f - %.4f| = %.4f < 0.15", grid[i], b, a,
                              std::abs(a - b)));
        }
    });

    // ---- 7. oracle equivalence -------------------------------------------------
    run_criterion(7, "oracle equivalence on 1000 randomized micro-cases", [](Checker& check) {
        int failures = 0;
        std::string first_why;
        for (std::uint64_t c = 0; c < 1000; ++c) {
            std::string why;
            const Engine engine = c % 2 == 0 ? Engine::serial : Engine::parallel;
            if (!micro_case_matches(c, engine, why)) {
                ++failures;
                if (first_why.empty()) first_why = why;
            }
        }
        check.require(failures == 0,
                      failures == 0 ? "all 1000 cases match the reference exactly"
                                    : fmt("%d cases diverged (first: %s)", failures,
                                          first_why.c_str()));
    });

    // ---- 8. determinism and parallelism ------------------------------------------
    run_criterion(8, "determinism and worker-count independence", [](Checker& check) {
        const fs::path dir = fs::temp_directory_path() / "herdsim_acceptance";
        fs::remove_all(dir);
        RunConfig config;
        config.model.num_agents = 1000;
        config.horizon_years = 4.0;
        config.window_years = 2.0;
        config.seed = 77;
        config.output_dir = (dir / "run").string();
        cmd_simulate(config);
        std::map<std::string, std::string> before;
        for (const char* name :
             {"prices.csv", "daily_returns.csv", "summary.json", "config.json"})
            before[name] = slurp(dir / "run" / name);
        cmd_simulate(config);
        for (const auto& [name, contents] : before)
            check.require(slurp(dir / "run" / name) == contents,
                          std::string(name) + " is byte-identical across reruns");

        ModelParams p;
        p.num_agents = 500;
        const std::vector<double> grid = {20.0};
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
        omp_set_num_threads(1);
        const SweepResult one = bifurcation_sweep(p, grid, 4, 2.0, 1.0, 5);
        omp_set_num_threads(max_threads);
        const SweepResult many = bifurcation_sweep(p, grid, 4, 2.0, 1.0, 5);
        check.require(one.points.at(0).run_values == many.points.at(0).run_values,
                      "sweep results identical with 1 worker and with all workers");
#else
        const SweepResult only = bifurcation_sweep(p, grid, 4, 2.0, 1.0, 5);
        check.require(!only.points.empty(), "sweep runs (built without OpenMP)");
#endif
        fs::remove_all(dir);
    });

    // ---- 9. performance --------------------------------------------------------
    run_criterion(9, "performance (desk run and full-scale run)", [](Checker& check) {
        auto start = std::chrono::steady_clock::now();
        const SimulationOutput desk = run_scenario(desk_defaults(), 31337, 0, 40.0);
        const double desk_elapsed = seconds_since(start);
        check.require(desk.sigma.size() == 100001, "desk run spans 1e5 steps");
        check.require(desk_elapsed < 10.0, fmt("desk run (M=1000) %.2f s < 10 s", desk_elapsed));

        ModelParams big;
        big.num_agents = 100000;
        start = std::chrono::steady_clock::now();
        const SimulationOutput full = run_scenario(big, 31337, 0, 40.0);
        const double full_elapsed = seconds_since(start);
        const double throughput = 1e10 / full_elapsed / 1e6;
        check.require(full.sigma.size() == 100001,
                      "full-scale run (M=100000, 1e5 steps) completed");
        check.info(fmt("full-scale run: %.1f s wall, %.1f M agent-updates/s "
                       "(soft target 30 min: %s)",
                       full_elapsed, throughput, full_elapsed < 1800.0 ? "met" : "exceeded"));
        check.info(fmt("full-scale total switches: %llu, final |sigma| = %.3f",
                       static_cast<unsigned long long>(full.total_switches),
                       std::abs(full.sigma.back())));
    });

    // ---- report ------------------------------------------------------------------
    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    std::printf("\n================ acceptance results ================\n");
    bool all_pass = true;
    for (const CriterionResult& r : results) {
        std::printf("[%s] criterion %d: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
        for (const std::string& note : r.notes) std::printf("%s\n", note.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("====================================================\n");
    std::printf("%s (%.1f s total)\n", all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED",
                seconds_since(suite_start));
    return all_pass ? 0 : 1;
}
