// Engine benchmark: identical scenario through the serial reference and the
// OpenMP engine, verifying bit-equality and reporting throughput for each.

#include "herdsim/model.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace herdsim;

namespace {

struct BenchResult {
    double seconds = 0.0;
    double final_log_price = 0.0;
    double final_sigma = 0.0;
    std::uint64_t switches = 0;
};

BenchResult run(Engine engine, const ModelParams& params, std::uint64_t seed, int steps) {
    RandomStream stream(seed, 0);
    MarketState market = init_market(params, stream);
    StepWorkspace ws;
    BenchResult result;
    const auto start = std::chrono::steady_clock::now();
    for (int n = 0; n < steps; ++n) {
        const double eta = stream.gaussian();
        result.switches += resolve_timestep(market, eta, params, stream, ws, engine).switch_count;
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.final_log_price = market.log_price;
    result.final_sigma = market.sigma;
    return result;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"herdsim-bench: serial reference vs OpenMP engine"};
    std::uint32_t agents = 100000;
    int steps = 2000;
    std::uint64_t seed = 1;
    app.add_option("--agents", agents, "population size");
    app.add_option("--steps", steps, "number of timesteps");
    app.add_option("--seed", seed, "stream seed");
    CLI11_PARSE(app, argc, argv);

    ModelParams params;
    params.num_agents = agents;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    const BenchResult serial = run(Engine::serial, params, seed, steps);
    const BenchResult parallel = run(Engine::parallel, params, seed, steps);

    const double updates = static_cast<double>(agents) * steps;
    std::printf("serial:   %.3f s  %8.1f M agent-updates/s  switches=%llu\n", serial.seconds,
                updates / serial.seconds / 1e6,
                static_cast<unsigned long long>(serial.switches));
    std::printf("parallel: %.3f s  %8.1f M agent-updates/s  switches=%llu\n", parallel.seconds,
                updates / parallel.seconds / 1e6,
                static_cast<unsigned long long>(parallel.switches));
    std::printf("speedup:  %.2fx\n", serial.seconds / parallel.seconds);

    const bool identical = serial.final_log_price == parallel.final_log_price &&
                           serial.final_sigma == parallel.final_sigma &&
                           serial.switches == parallel.switches;
    std::printf("engines bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
