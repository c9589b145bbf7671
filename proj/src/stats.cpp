#include "herdsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace herdsim {

namespace {

double sample_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

ReturnSeries daily_returns(std::span<const double> log_prices, std::uint32_t steps_per_day) {
    if (steps_per_day < 1) throw std::invalid_argument("daily_returns: steps_per_day < 1");
    if (log_prices.size() < static_cast<std::size_t>(steps_per_day) + 1)
        throw std::invalid_argument("daily_returns: series shorter than one day");
    const std::size_t k = steps_per_day;
    const std::size_t days = (log_prices.size() - 1) / k;
    ReturnSeries out;
    out.steps_per_day = steps_per_day;
    out.values.resize(days);
    for (std::size_t d = 1; d <= days; ++d)
        out.values[d - 1] = log_prices[d * k] - log_prices[(d - 1) * k];
    return out;
}

double excess_kurtosis(std::span<const double> values) {
    if (values.size() < 4) throw std::invalid_argument("excess_kurtosis: need at least 4 values");
    const double m = sample_mean(values);
    double m2 = 0.0, m4 = 0.0;
    for (double x : values) {
        const double d = x - m;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(values.size());
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) throw std::invalid_argument("excess_kurtosis: zero variance");
    return m4 / (m2 * m2) - 3.0;
}

double autocorrelation(std::span<const double> values, std::size_t lag) {
    if (lag >= values.size()) throw std::invalid_argument("autocorrelation: lag >= length");
    const double m = sample_mean(values);
    double denom = 0.0;
    for (double x : values) denom += (x - m) * (x - m);
    if (denom == 0.0) throw std::invalid_argument("autocorrelation: zero variance");
    double num = 0.0;
    for (std::size_t t = lag; t < values.size(); ++t)
        num += (values[t] - m) * (values[t - lag] - m);
    return num / denom;
}

std::vector<double> volatility_acf(const ReturnSeries& returns, std::size_t max_lag) {
    if (max_lag < 1) throw std::invalid_argument("volatility_acf: max_lag < 1");
    if (max_lag >= returns.values.size())
        throw std::invalid_argument("volatility_acf: max_lag >= length");
    std::vector<double> magnitudes(returns.values.size());
    for (std::size_t i = 0; i < magnitudes.size(); ++i)
        magnitudes[i] = std::abs(returns.values[i]);
    std::vector<double> acf(max_lag);
    for (std::size_t lag = 1; lag <= max_lag; ++lag)
        acf[lag - 1] = autocorrelation(magnitudes, lag);
    return acf;
}

double tail_exponent(std::span<const double> values, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5))
        throw std::invalid_argument("tail_exponent: tail_fraction must lie in (0, 0.5]");
    std::vector<double> magnitudes(values.size());
    for (std::size_t i = 0; i < magnitudes.size(); ++i) magnitudes[i] = std::abs(values[i]);
    const std::size_t k =
        static_cast<std::size_t>(static_cast<double>(magnitudes.size()) * tail_fraction);
    if (k < 50) throw std::invalid_argument("tail_exponent: fewer than 50 tail samples");
    if (k + 1 > magnitudes.size())
        throw std::invalid_argument("tail_exponent: tail covers the whole sample");
    std::nth_element(magnitudes.begin(), magnitudes.begin() + static_cast<std::ptrdiff_t>(k),
                     magnitudes.end(), std::greater<>());
    const double threshold = magnitudes[k];  // x_(k+1)
    if (!(threshold > 0.0))
        throw std::invalid_argument("tail_exponent: tail threshold is not positive");
    double log_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) log_sum += std::log(magnitudes[i] / threshold);
    if (log_sum == 0.0) throw std::invalid_argument("tail_exponent: degenerate tail");
    return static_cast<double>(k) / log_sum;
}

std::vector<double> default_density_edges(std::uint32_t bins) {
    if (bins < 1) throw std::invalid_argument("density bins must be at least 1");
    std::vector<double> edges(bins + 1);
    for (std::uint32_t i = 0; i <= bins; ++i)
        edges[i] = -0.5 + static_cast<double>(i) / static_cast<double>(bins);
    return edges;
}

ThresholdDensity threshold_density(const MarketState& market,
                                   std::span<const double> bin_edges) {
    if (bin_edges.size() < 2)
        throw std::invalid_argument("threshold_density: need at least two bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw std::invalid_argument("threshold_density: bin edges must be strictly increasing");
    if (bin_edges.front() > -0.5 || bin_edges.back() < 0.5)
        throw std::invalid_argument("threshold_density: bin edges must cover [-0.5, 0.5]");

    ThresholdDensity out;
    out.bin_edges.assign(bin_edges.begin(), bin_edges.end());
    const std::size_t bins = bin_edges.size() - 1;
    for (auto& by_state : out.counts)
        for (auto& hist : by_state) hist.assign(bins, 0);

    const Population& pop = market.agents;
    const double price = market.price;
    auto tally = [&](std::uint8_t state, int kind, double threshold) {
        const double displacement = (threshold - price) / price;
        if (displacement < bin_edges.front()) {
            ++out.underflow[state][static_cast<std::size_t>(kind)];
            return;
        }
        if (displacement >= bin_edges.back()) {
            ++out.overflow[state][static_cast<std::size_t>(kind)];
            return;
        }
        const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), displacement);
        const auto bin = static_cast<std::size_t>(it - bin_edges.begin()) - 1;
        ++out.counts[state][static_cast<std::size_t>(kind)][bin];
    };
    for (std::size_t i = 0; i < pop.size(); ++i) {
        tally(pop.state[i], 0, pop.lower[i]);
        tally(pop.state[i], 1, pop.upper[i]);
    }
    return out;
}

}  // namespace herdsim
