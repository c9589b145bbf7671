// Serial reference engine. Plain sequential loops over the population; the
// parallel engine in model_parallel.cpp must reproduce this bit for bit.

#include "herdsim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace herdsim::detail {

StepOutcome step_serial(MarketState& market, double eta, const ModelParams& params,
                        RandomStream& stream, StepWorkspace& ws) {
    Population& pop = market.agents;
    const std::size_t n = pop.size();

    const double price_open = market.price;
    const double sigma_open = market.sigma;
    const double shock = information_shock(eta, params.h);
    const double f = fast_agent_factor(sigma_open, params.alpha);

    // 1. Threshold drift at the opening price and sentiment. Two gaussian
    //    draws per agent, lower before upper.
    const double herd_scale = price_open * params.h * std::abs(sigma_open);
    std::uint8_t minority_state = 2;  // matches nobody
    if (sigma_open < 0.0) minority_state = 1;
    if (sigma_open > 0.0) minority_state = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z_lower = stream.gaussian();
        const double z_upper = stream.gaussian();
        const double noise_scale = price_open * std::sqrt(params.h * pop.delta[i]);
        apply_drift(pop.lower[i], pop.upper[i], pop.state[i] == minority_state,
                    herd_scale * pop.herding[i], noise_scale, z_lower, z_upper);
    }

    // 2. Candidate price with no demand change.
    double price = apply_price_update(price_open, shock, f, params.kappa, 0.0);
    double sigma = sigma_open;

    // 3. Cascade: batch-simultaneous switching, one switch per agent.
    StepOutcome out;
    while (true) {
        ws.batch.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (ws.switched_stamp[i] != ws.epoch && needs_switch(pop.lower[i], pop.upper[i], price))
                ws.batch.push_back(static_cast<std::uint32_t>(i));
        }
        if (ws.batch.empty()) break;

        for (const std::uint32_t i : ws.batch) {
            pop.state[i] ^= 1;
            ws.switched_stamp[i] = ws.epoch;
        }
        sigma = sigma_from(weighted_state_sum(pop, ws.partials, false), pop.total_weight);
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
            throw std::logic_error("step_serial: cascade failed to terminate");
    }

    // 4. Finalize.
    market.price = price;
    market.log_price += shock * f + params.kappa * (sigma - sigma_open);
    market.sigma = sigma;
    ++market.step;
    out.new_price = price;
    out.new_sigma = sigma;
    return out;
}

}  // namespace herdsim::detail
