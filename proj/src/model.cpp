#include "herdsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace herdsim {

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(h > 0.0) || !std::isfinite(h)) fail("h: must be a positive finite real");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail("kappa: must be a nonnegative real");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha: must be a nonnegative real");
    if (num_agents < 1) fail("num_agents: must be at least 1");
    if (steps_per_day < 1) fail("steps_per_day: must be at least 1");
    if (!(reset_lo >= 0.0) || !(reset_hi >= reset_lo) || !std::isfinite(reset_hi))
        fail("reset_lo/reset_hi: need 0 <= reset_lo <= reset_hi");
    if (!(herding_lo >= 0.0) || !(herding_hi >= herding_lo) || !std::isfinite(herding_hi))
        fail("herding_lo/herding_hi: need 0 <= herding_lo <= herding_hi");
    if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta: must be a nonnegative real");
    if (!(initial_price > 0.0) || !std::isfinite(initial_price))
        fail("initial_price: must be a positive finite real");
    if (!(initial_sigma >= -1.0 && initial_sigma <= 1.0))
        fail("initial_sigma: must lie in [-1, 1]");
    if (!weights.empty()) {
        if (weights.size() != num_agents)
            fail("weights: explicit list must have num_agents entries");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                fail("weights: every weight must be a positive finite real");
    }
}

Agent Population::agent(std::size_t i) const {
    return Agent{state[i], lower[i], upper[i], weight[i], herding[i], delta[i]};
}

void Population::set_agent(std::size_t i, const Agent& a) {
    state[i] = a.state;
    lower[i] = a.lower;
    upper[i] = a.upper;
    weight[i] = a.weight;
    herding[i] = a.herding;
    delta[i] = a.threshold_volatility;
    recompute_total_weight();
}

void Population::recompute_total_weight() { total_weight = canonical_sum(weight); }

Population Population::from_agents(std::span<const Agent> agents) {
    Population pop;
    const std::size_t n = agents.size();
    pop.state.resize(n);
    pop.lower.resize(n);
    pop.upper.resize(n);
    pop.weight.resize(n);
    pop.herding.resize(n);
    pop.delta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Agent& a = agents[i];
        pop.state[i] = a.state;
        pop.lower[i] = a.lower;
        pop.upper[i] = a.upper;
        pop.weight[i] = a.weight;
        pop.herding[i] = a.herding;
        pop.delta[i] = a.threshold_volatility;
    }
    pop.recompute_total_weight();
    return pop;
}

namespace detail {

double canonical_sum_serial(std::span<const double> values, std::vector<double>& partials) {
    const std::size_t n = values.size();
    const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
    partials.assign(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t end = std::min(n, (b + 1) * kSumBlock);
        double acc = 0.0;
        for (std::size_t i = b * kSumBlock; i < end; ++i) acc += values[i];
        partials[b] = acc;
    }
    double total = 0.0;
    for (double p : partials) total += p;
    return total;
}

double weighted_state_sum(const Population& agents, std::vector<double>& partials,
                          bool parallel) {
    const std::size_t n = agents.size();
    const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
    partials.assign(blocks, 0.0);
    const std::uint8_t* state = agents.state.data();
    const double* weight = agents.weight.data();
    auto sum_block = [&](std::size_t b) {
        const std::size_t begin = b * kSumBlock;
        const std::size_t end = std::min(n, begin + kSumBlock);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += state[i] ? weight[i] : 0.0;
        partials[b] = acc;
    };
    if (parallel && blocks > 8) {
#pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b)
            sum_block(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < blocks; ++b) sum_block(b);
    }
    double total = 0.0;
    for (double p : partials) total += p;
    return total;
}

}  // namespace detail

double canonical_sum(std::span<const double> values) {
    std::vector<double> partials;
    return detail::canonical_sum_serial(values, partials);
}

double compute_sigma(const Population& agents) {
    if (agents.empty()) throw std::invalid_argument("compute_sigma: empty population");
    std::vector<double> partials;
    const double held = detail::weighted_state_sum(agents, partials, false);
    return detail::sigma_from(held, agents.total_weight);
}

double information_shock(double eta, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("information_shock: h must be positive");
    return std::sqrt(h) * eta - h / 2.0;
}

double fast_agent_factor(double sigma, double alpha) {
    return 1.0 + alpha * std::abs(sigma);
}

double apply_price_update(double prev_price, double shock, double f_value, double kappa,
                          double delta_sigma) {
    if (!(prev_price > 0.0) || !std::isfinite(prev_price) || !std::isfinite(shock) ||
        !std::isfinite(f_value) || !std::isfinite(kappa) || !std::isfinite(delta_sigma))
        throw std::invalid_argument("apply_price_update: non-finite input");
    return prev_price * std::exp(shock * f_value + kappa * delta_sigma);
}

void drift_thresholds(Agent& agent, double price, double sigma, double h,
                      RandomStream& stream) {
    if (!(h > 0.0)) throw std::invalid_argument("drift_thresholds: h must be positive");
    const double z_lower = stream.gaussian();
    const double z_upper = stream.gaussian();
    const double herd_drift = price * h * std::abs(sigma) * agent.herding;
    const double noise_scale = price * std::sqrt(h * agent.threshold_volatility);
    detail::apply_drift(agent.lower, agent.upper, is_minority(agent.state, sigma),
                        herd_drift, noise_scale, z_lower, z_upper);
}

std::pair<double, double> reset_thresholds(double switch_price, double reset_lo,
                                           double reset_hi, RandomStream& stream) {
    const double z_lower = stream.uniform(reset_lo, reset_hi);
    const double z_upper = stream.uniform(reset_lo, reset_hi);
    return {switch_price / (1.0 + z_lower), switch_price * (1.0 + z_upper)};
}

void StepWorkspace::prepare(std::size_t num_agents) {
    if (switched_stamp.size() != num_agents) {
        switched_stamp.assign(num_agents, 0);
        epoch = 0;
    }
    batch.clear();
}

MarketState init_market(const ModelParams& params, RandomStream& stream) {
    params.validate();
    const std::size_t n = params.num_agents;

    Population pop;
    pop.state.assign(n, 0);
    pop.lower.resize(n);
    pop.upper.resize(n);
    pop.herding.resize(n);
    pop.delta.assign(n, params.delta);
    if (params.weights.empty())
        pop.weight.assign(n, 1.0);
    else
        pop.weight = params.weights;
    pop.recompute_total_weight();

    const auto holders = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * (1.0 + params.initial_sigma) / 2.0));
    for (std::size_t i = 0; i < holders && i < n; ++i) pop.state[i] = 1;

    for (std::size_t i = 0; i < n; ++i) {
        const auto [lo, up] =
            reset_thresholds(params.initial_price, params.reset_lo, params.reset_hi, stream);
        pop.lower[i] = lo;
        pop.upper[i] = up;
        pop.herding[i] = stream.uniform(params.herding_lo, params.herding_hi);
    }

    MarketState market;
    market.price = params.initial_price;
    market.log_price = std::log(params.initial_price);
    market.agents = std::move(pop);
    market.sigma = compute_sigma(market.agents);
    market.step = 0;
    return market;
}

StepOutcome resolve_timestep(MarketState& market, double eta, const ModelParams& params,
                             RandomStream& stream, StepWorkspace& ws, Engine engine) {
    if (market.agents.empty())
        throw std::invalid_argument("resolve_timestep: empty population");
    ws.prepare(market.agents.size());
    ++ws.epoch;
    return engine == Engine::serial ? detail::step_serial(market, eta, params, stream, ws)
                                    : detail::step_parallel(market, eta, params, stream, ws);
}

StepOutcome resolve_timestep(MarketState& market, double eta, const ModelParams& params,
                             RandomStream& stream, Engine engine) {
    StepWorkspace ws;
    return resolve_timestep(market, eta, params, stream, ws, engine);
}

}  // namespace herdsim
