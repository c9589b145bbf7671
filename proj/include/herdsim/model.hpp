#pragma once

#include "herdsim/random.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace herdsim {

/// Value snapshot of one slow agent. `state` is 1 when the agent holds its
/// block of `weight` units and 0 when it holds none. The comfort zone
/// [lower, upper] straddles the price while the agent is content; `herding`
/// is the inward drift rate applied while in the minority, and
/// `threshold_volatility` scales the diffusive motion of both thresholds.
struct Agent {
    std::uint8_t state = 0;
    double lower = 0.0;
    double upper = 0.0;
    double weight = 1.0;
    double herding = 0.0;
    double threshold_volatility = 0.0;
};

/// Full model calibration. Field names match the JSON config schema.
/// Defaults are the standard calibration; see README for their meaning.
struct ModelParams {
    double h = 4e-6;              // timestep, in information-variance units
    double kappa = 0.1;           // market depth of the slow agents
    double alpha = 1.0;           // fast-agent distortion: f = 1 + alpha*|sigma|
    std::uint32_t num_agents = 100000;
    std::uint32_t steps_per_day = 10;
    double reset_lo = 0.05;       // threshold reset draws Z ~ U[reset_lo, reset_hi]
    double reset_hi = 0.25;
    double herding_lo = 25.0;     // herding coefficients C ~ U[herding_lo, herding_hi]
    double herding_hi = 100.0;
    double delta = 0.2;           // threshold volatility, uniform across agents
    double initial_price = 1.0;
    double initial_sigma = 0.0;
    std::vector<double> weights;  // empty = unit weights

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Agent population in structure-of-arrays layout. All vectors share the
/// same length; `total_weight` is the canonical-sum of `weight` and is kept
/// in sync by the constructors/setters below.
struct Population {
    std::vector<std::uint8_t> state;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> weight;
    std::vector<double> herding;
    std::vector<double> delta;
    double total_weight = 0.0;

    std::size_t size() const { return state.size(); }
    bool empty() const { return state.empty(); }

    Agent agent(std::size_t i) const;
    void set_agent(std::size_t i, const Agent& a);
    void recompute_total_weight();

    static Population from_agents(std::span<const Agent> agents);
};

struct MarketState {
    double price = 1.0;
    double log_price = 0.0;
    double sigma = 0.0;
    std::uint64_t step = 0;
    Population agents;
};

struct StepOutcome {
    double new_price = 0.0;
    double new_sigma = 0.0;
    std::uint32_t switch_count = 0;
    // Number of non-empty switch batches resolved within the step; 0 for a
    // quiescent step.
    std::uint32_t cascade_iterations = 0;
};

enum class Engine { serial, parallel };

// ---------------------------------------------------------------------------
// Deterministic reduction
//
// All weighted sums over the population use one fixed summation tree:
// blocks of kSumBlock elements accumulated left to right, block partials
// folded left to right. The tree depends only on the array length, never on
// the thread count, so serial and parallel engines produce identical bits.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSumBlock = 1024;

double canonical_sum(std::span<const double> values);

// ---------------------------------------------------------------------------
// Elementary step rules
// ---------------------------------------------------------------------------

/// Weighted sentiment of the population: 2/W * sum(state_i * weight_i) - 1,
/// +1 when every agent holds and -1 when none does. Throws on an empty
/// population.
double compute_sigma(const Population& agents);

/// Exogenous log-price increment before fast-agent scaling:
/// sqrt(h)*eta - h/2. Throws unless h > 0.
double information_shock(double eta, double h);

/// Fast-agent distortion factor f = 1 + alpha*|sigma|; identically 1 when
/// alpha = 0.
double fast_agent_factor(double sigma, double alpha);

/// One application of the pricing law:
/// prev_price * exp(shock*f_value + kappa*delta_sigma). Throws on non-finite
/// inputs or non-positive prev_price.
double apply_price_update(double prev_price, double shock, double f_value,
                          double kappa, double delta_sigma);

/// True when the agent is holding against a negative market or flat against
/// a positive one. Nobody is in the minority at sigma == 0.
inline bool is_minority(std::uint8_t state, double sigma) {
    return (state == 1 && sigma < 0.0) || (state == 0 && sigma > 0.0);
}

/// Threshold dynamics for one agent over one timestep, given the price and
/// sentiment the step opened with. Majority agents diffuse: both thresholds
/// move by independent price*N(0, h*delta) increments (second argument is
/// the variance). Minority agents additionally drift inward at rate
/// price*C*h*|sigma| on both sides. Consumes exactly two gaussian ticks,
/// lower before upper.
void drift_thresholds(Agent& agent, double price, double sigma, double h,
                      RandomStream& stream);

/// Strict interval test: true when the price lies outside [lower, upper].
/// An inverted interval (lower > upper) contains nothing, so it always
/// reports true.
inline bool needs_switch(double lower, double upper, double price) {
    return price < lower || price > upper;
}
inline bool needs_switch(const Agent& a, double price) {
    return needs_switch(a.lower, a.upper, price);
}

/// Fresh comfort zone around a switch price: [p/(1+Z_L), p*(1+Z_U)] with
/// independent Z_L, Z_U ~ U[reset_lo, reset_hi], drawn in that order.
std::pair<double, double> reset_thresholds(double switch_price, double reset_lo,
                                           double reset_hi, RandomStream& stream);

// ---------------------------------------------------------------------------
// Timestep
//
// resolve_timestep advances the market by one step:
//   1. drift every agent's thresholds using the opening price and sentiment
//      (two gaussian ticks per agent, in agent-index order);
//   2. compute the candidate price prev*exp(shock*f) with f frozen at the
//      opening sentiment;
//   3. cascade: repeatedly collect every not-yet-switched agent whose
//      interval excludes the current price, flip the whole batch at once,
//      recompute sigma, reprice from the *opening* price as
//      prev*exp(shock*f + kappa*(sigma_batch - sigma_open)), and reset the
//      batch's thresholds around that post-batch price (two uniform ticks
//      per switcher, Z_L then Z_U, in agent-index order);
//   4. finalize with the last computed price and sentiment.
// Each agent switches at most once per step, so the cascade terminates.
//
// Per-step draw order (documented contract): the caller draws eta first;
// the step then consumes 2*M gaussian ticks for the drift pass and two
// uniform ticks per switch. Both engines and any thread count produce
// bit-identical results.
// ---------------------------------------------------------------------------

/// Scratch buffers reused across steps.
struct StepWorkspace {
    std::vector<std::uint64_t> switched_stamp;  // epoch of the agent's last switch
    std::vector<std::uint32_t> batch;           // switcher indices, ascending
    std::vector<double> partials;               // reduction partials
    std::vector<std::uint32_t> block_hits;      // per-block candidate counts
    std::uint64_t epoch = 0;                    // bumped once per resolve call

    void prepare(std::size_t num_agents);
};

StepOutcome resolve_timestep(MarketState& market, double eta, const ModelParams& params,
                             RandomStream& stream, StepWorkspace& ws,
                             Engine engine = Engine::parallel);

/// Convenience overload with a throwaway workspace.
StepOutcome resolve_timestep(MarketState& market, double eta, const ModelParams& params,
                             RandomStream& stream, Engine engine = Engine::parallel);

/// Build the opening market state. Exactly round(M*(1+initial_sigma)/2)
/// agents (the lowest indices) start in state 1. Per agent, in index order,
/// the stream supplies Z_L, Z_U for the initial comfort zone around
/// initial_price and then the herding coefficient C ~ U[herding_lo,
/// herding_hi]: three uniform ticks per agent.
MarketState init_market(const ModelParams& params, RandomStream& stream);

namespace detail {

// Shared between the engines, the serial reference and the tests: the exact
// arithmetic of the drift rules. noise_scale = price * sqrt(h*delta),
// herd_drift = price * h * |sigma| * C, evaluated left to right.
inline void apply_drift(double& lower, double& upper, bool minority, double herd_drift,
                        double noise_scale, double z_lower, double z_upper) {
    if (minority) {
        lower += herd_drift + noise_scale * z_lower;
        upper -= herd_drift + noise_scale * z_upper;
    } else {
        lower += noise_scale * z_lower;
        upper += noise_scale * z_upper;
    }
}

double canonical_sum_serial(std::span<const double> values, std::vector<double>& partials);
double weighted_state_sum(const Population& agents, std::vector<double>& partials,
                          bool parallel);

inline double sigma_from(double held_weight, double total_weight) {
    return 2.0 * (held_weight / total_weight) - 1.0;
}

StepOutcome step_serial(MarketState& market, double eta, const ModelParams& params,
                        RandomStream& stream, StepWorkspace& ws);
StepOutcome step_parallel(MarketState& market, double eta, const ModelParams& params,
                          RandomStream& stream, StepWorkspace& ws);

}  // namespace detail

}  // namespace herdsim
