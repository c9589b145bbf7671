// OpenMP engine. Bit-identical to step_serial for any thread count: gaussian
// draws are addressed by tick rather than consumed in loop order, switch
// candidates are gathered over a fixed block grid, and every reduction uses
// the canonical summation tree. Falls back to plain serial loops when built
// without OpenMP.

#include "herdsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace herdsim::detail {

namespace {

constexpr std::size_t kScanBlock = 4096;

// Below this population size the per-step cost of entering an OpenMP region
// outweighs the loop itself; run the identical loop bodies inline instead.
// The arithmetic and the summation/gather grids do not change, so results
// are unaffected.
constexpr std::size_t kParallelCutoff = 8192;

// Gather the indices of all not-yet-switched agents whose interval excludes
// `price`, in ascending order: count per block, prefix, then fill.
void collect_switchers(const Population& pop, double price, StepWorkspace& ws) {
    const std::size_t n = pop.size();
    const std::size_t blocks = (n + kScanBlock - 1) / kScanBlock;
    ws.block_hits.assign(blocks, 0);
    const double* lower = pop.lower.data();
    const double* upper = pop.upper.data();
    const std::uint64_t* stamp = ws.switched_stamp.data();
    const std::uint64_t epoch = ws.epoch;

    auto count_block = [&](std::size_t b) {
        const std::size_t begin = b * kScanBlock;
        const std::size_t end = std::min(n, begin + kScanBlock);
        std::uint32_t hits = 0;
        for (std::size_t i = begin; i < end; ++i)
            hits += (stamp[i] != epoch && needs_switch(lower[i], upper[i], price)) ? 1u : 0u;
        ws.block_hits[b] = hits;
    };
    auto fill_block = [&](std::size_t b) {
        const std::size_t begin = b * kScanBlock;
        const std::size_t end = std::min(n, begin + kScanBlock);
        std::uint32_t at = ws.block_hits[b];
        for (std::size_t i = begin; i < end; ++i)
            if (stamp[i] != epoch && needs_switch(lower[i], upper[i], price))
                ws.batch[at++] = static_cast<std::uint32_t>(i);
    };

    if (blocks > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b)
            count_block(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < blocks; ++b) count_block(b);
    }

    std::uint32_t total = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::uint32_t hits = ws.block_hits[b];
        ws.block_hits[b] = total;  // becomes the block's write offset
        total += hits;
    }
    ws.batch.resize(total);
    if (total == 0) return;

    if (blocks > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b)
            fill_block(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < blocks; ++b) fill_block(b);
    }
}

}  // namespace

StepOutcome step_parallel(MarketState& market, double eta, const ModelParams& params,
                          RandomStream& stream, StepWorkspace& ws) {
    Population& pop = market.agents;
    const std::size_t n = pop.size();

    const double price_open = market.price;
    const double sigma_open = market.sigma;
    const double shock = information_shock(eta, params.h);
    const double f = fast_agent_factor(sigma_open, params.alpha);

    const double herd_scale = price_open * params.h * std::abs(sigma_open);
    std::uint8_t minority_state = 2;
    if (sigma_open < 0.0) minority_state = 1;
    if (sigma_open > 0.0) minority_state = 0;

    // Drift pass over the step's pre-assigned tick range [t0, t0 + 2n):
    // agent i reads ticks t0 + 2i and t0 + 2i + 1.
    const std::uint64_t t0 = stream.tick();
    const double h = params.h;
    {
        double* lower = pop.lower.data();
        double* upper = pop.upper.data();
        const double* delta = pop.delta.data();
        const double* herding = pop.herding.data();
        const std::uint8_t* state = pop.state.data();
        auto drift_agent = [&](std::size_t k, BlockReader& reader) {
            const std::uint64_t tick = t0 + 2 * static_cast<std::uint64_t>(k);
            const double z_lower = reader.gaussian_at(tick);
            const double z_upper = reader.gaussian_at(tick + 1);
            const double noise_scale = price_open * std::sqrt(h * delta[k]);
            apply_drift(lower[k], upper[k], state[k] == minority_state,
                        herd_scale * herding[k], noise_scale, z_lower, z_upper);
        };
        if (n >= kParallelCutoff) {
#pragma omp parallel
            {
                BlockReader reader(stream);
#pragma omp for schedule(static)
                for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
                    drift_agent(static_cast<std::size_t>(i), reader);
            }
        } else {
            BlockReader reader(stream);
            for (std::size_t i = 0; i < n; ++i) drift_agent(i, reader);
        }
    }
    stream.seek(t0 + 2 * static_cast<std::uint64_t>(n));

    double price = apply_price_update(price_open, shock, f, params.kappa, 0.0);
    double sigma = sigma_open;

    StepOutcome out;
    while (true) {
        collect_switchers(pop, price, ws);
        if (ws.batch.empty()) break;

        for (const std::uint32_t i : ws.batch) {
            pop.state[i] ^= 1;
            ws.switched_stamp[i] = ws.epoch;
        }
        sigma = sigma_from(weighted_state_sum(pop, ws.partials, true), pop.total_weight);
        price = apply_price_update(price_open, shock, f, params.kappa, sigma - sigma_open);
        for (const std::uint32_t i : ws.batch) {
            const auto [lo, up] =
                reset_thresholds(price, params.reset_lo, params.reset_hi, stream);
            pop.lower[i] = lo;
            pop.upper[i] = up;
        }
        out.switch_count += static_cast<std::uint32_t>(ws.batch.size());
        ++out.cascade_iterations;
        if (out.cascade_iterations > n)
            throw std::logic_error("step_parallel: cascade failed to terminate");
    }

    market.price = price;
    market.log_price += shock * f + params.kappa * (sigma - sigma_open);
    market.sigma = sigma;
    ++market.step;
    out.new_price = price;
    out.new_sigma = sigma;
    return out;
}

}  // namespace herdsim::detail
