#pragma once

#include "herdsim/model.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace herdsim {

/// Daily log returns aggregated from a per-step log-price series.
struct ReturnSeries {
    std::vector<double> values;
    std::uint32_t steps_per_day = 1;
};

/// Day d covers steps ((d-1)*k, d*k]: value = P(d*k) - P((d-1)*k). A trailing
/// partial day is discarded. Throws if fewer than steps_per_day + 1 prices.
ReturnSeries daily_returns(std::span<const double> log_prices, std::uint32_t steps_per_day);

/// Fourth standardized central moment minus 3, with plain 1/n moment
/// estimators (no bias correction). Throws on length < 4 or zero variance.
double excess_kurtosis(std::span<const double> values);

/// Sample autocorrelation at one lag, normalized by the lag-0 sum of squared
/// deviations: r_k = sum_{t>=k}(x_t - m)(x_{t-k} - m) / sum_t (x_t - m)^2.
/// Throws on lag >= length or zero variance.
double autocorrelation(std::span<const double> values, std::size_t lag);

/// Autocorrelation of |returns| at lags 1..max_lag.
std::vector<double> volatility_acf(const ReturnSeries& returns, std::size_t max_lag);

/// Hill tail-index estimate over the top tail_fraction of |values|:
/// with the k largest magnitudes x_(1) >= ... >= x_(k) and the next order
/// statistic x_(k+1), returns k / sum_i log(x_(i) / x_(k+1)).
/// Requires tail_fraction in (0, 0.5] and at least 50 tail samples.
double tail_exponent(std::span<const double> values, double tail_fraction);

/// Threshold displacement histograms: (threshold - price) / price for each
/// agent, split by agent state and by threshold kind. Counts land in bins
/// delimited by bin_edges; displacements outside the edge range are tallied
/// in underflow/overflow so each (state, kind) group always sums to the
/// number of agents in that state.
struct ThresholdDensity {
    std::vector<double> bin_edges;
    // Indexed [state][kind] with kind 0 = lower, 1 = upper.
    std::array<std::array<std::vector<std::uint64_t>, 2>, 2> counts{};
    std::array<std::array<std::uint64_t, 2>, 2> underflow{};
    std::array<std::array<std::uint64_t, 2>, 2> overflow{};
};

/// Bin edges must be strictly increasing and cover [-0.5, 0.5].
ThresholdDensity threshold_density(const MarketState& market,
                                   std::span<const double> bin_edges);

/// Uniform bin edges spanning [-0.5, 0.5].
std::vector<double> default_density_edges(std::uint32_t bins);

}  // namespace herdsim
