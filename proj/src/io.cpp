#include "herdsim/io.hpp"

#include "herdsim/stats.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace herdsim {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string provenance_line(std::uint64_t seed, std::uint64_t substream,
                            const std::string& hash) {
    std::ostringstream line;
    line << "# seed=" << seed << " substream=" << substream << " config_hash=" << hash;
    return line.str();
}

void write_prices_csv(const fs::path& path, const SimulationOutput& output,
                      const std::string& hash) {
    std::ostringstream csv;
    csv << provenance_line(output.seed, output.substream, hash) << '\n';
    csv << "step,model_log_price,baseline_log_price,sigma,switches\n";
    for (std::size_t n = 0; n < output.model_log_price.size(); ++n) {
        csv << n << ',' << format_double(output.model_log_price[n]) << ','
            << format_double(output.baseline_log_price[n]) << ','
            << format_double(output.sigma[n]) << ',' << output.switches[n] << '\n';
    }
    atomic_write_file(path, csv.str());
}

void write_daily_returns_csv(const fs::path& path, const SimulationOutput& output,
                             const std::string& hash) {
    const ReturnSeries model = daily_returns(output.model_log_price, output.params.steps_per_day);
    const ReturnSeries base =
        daily_returns(output.baseline_log_price, output.params.steps_per_day);
    std::ostringstream csv;
    csv << provenance_line(output.seed, output.substream, hash) << '\n';
    csv << "day,model_return_pct,baseline_return_pct\n";
    for (std::size_t d = 0; d < model.values.size(); ++d) {
        csv << (d + 1) << ',' << format_double(std::exp(model.values[d]) - 1.0) << ','
            << format_double(std::exp(base.values[d]) - 1.0) << '\n';
    }
    atomic_write_file(path, csv.str());
}

void write_density_csv(const fs::path& path, const DensitySnapshot& snapshot,
                       std::uint64_t seed, std::uint64_t substream, const std::string& hash) {
    std::ostringstream csv;
    csv << provenance_line(seed, substream, hash) << '\n';
    csv << "# snapshot_step=" << snapshot.step << '\n';
    csv << "bin_lo,bin_hi,state0_lower,state0_upper,state1_lower,state1_upper\n";
    const ThresholdDensity& d = snapshot.density;
    csv << "-inf," << format_double(d.bin_edges.front()) << ',' << d.underflow[0][0] << ','
        << d.underflow[0][1] << ',' << d.underflow[1][0] << ',' << d.underflow[1][1] << '\n';
    for (std::size_t b = 0; b + 1 < d.bin_edges.size(); ++b) {
        csv << format_double(d.bin_edges[b]) << ',' << format_double(d.bin_edges[b + 1]) << ','
            << d.counts[0][0][b] << ',' << d.counts[0][1][b] << ',' << d.counts[1][0][b] << ','
            << d.counts[1][1][b] << '\n';
    }
    csv << format_double(d.bin_edges.back()) << ",inf," << d.overflow[0][0] << ','
        << d.overflow[0][1] << ',' << d.overflow[1][0] << ',' << d.overflow[1][1] << '\n';
    atomic_write_file(path, csv.str());
}

void write_sweep_csv(const fs::path& path, const SweepResult& sweep,
                     const std::string& hash) {
    std::ostringstream csv;
    csv << provenance_line(sweep.seed, 0, hash) << '\n';
    csv << "c_max,alpha,delta,runs_per_point,seed,mean_max_abs_sigma";
    for (std::uint32_t r = 0; r < sweep.runs_per_point; ++r) csv << ",run_value_" << r;
    for (std::uint32_t r = 0; r < sweep.runs_per_point; ++r) csv << ",substream_" << r;
    csv << '\n';
    for (const SweepPoint& point : sweep.points) {
        csv << format_double(point.c_max) << ',' << format_double(sweep.base.alpha) << ','
            << format_double(sweep.base.delta) << ',' << sweep.runs_per_point << ','
            << sweep.seed << ',' << format_double(point.mean_max_abs_sigma);
        for (double v : point.run_values) csv << ',' << format_double(v);
        for (std::uint64_t s : point.substreams) csv << ',' << s;
        csv << '\n';
    }
    atomic_write_file(path, csv.str());
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double_field(const std::string& text, const fs::path& path, std::size_t row,
                          const char* column) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                 ": column '" + column + "' is not a number: '" + text + "'");
    return value;
}

std::uint64_t parse_uint_field(const std::string& text, const fs::path& path, std::size_t row,
                               const char* column) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                 ": column '" + column + "' is not an integer: '" + text + "'");
    return value;
}

}  // namespace

PricesData read_prices_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    static const char* kColumns[5] = {"step", "model_log_price", "baseline_log_price",
                                      "sigma", "switches"};
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    PricesData data;
    std::uint64_t expected_step = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> fields = split_csv_row(line);
        if (fields.size() != 5)
            throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                     ": expected 5 fields, got " + std::to_string(fields.size()));
        if (!header_seen) {
            for (int c = 0; c < 5; ++c)
                if (fields[static_cast<std::size_t>(c)] != kColumns[c])
                    throw std::runtime_error(path.string() + ": column " + std::to_string(c + 1) +
                                             ": expected '" + kColumns[c] + "', got '" +
                                             fields[static_cast<std::size_t>(c)] + "'");
            header_seen = true;
            continue;
        }
        const std::uint64_t step = parse_uint_field(fields[0], path, row, "step");
        if (step != expected_step)
            throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                                     ": non-contiguous step index");
        ++expected_step;
        data.step.push_back(step);
        data.model_log_price.push_back(parse_double_field(fields[1], path, row, kColumns[1]));
        data.baseline_log_price.push_back(parse_double_field(fields[2], path, row, kColumns[2]));
        data.sigma.push_back(parse_double_field(fields[3], path, row, kColumns[3]));
        data.switches.push_back(
            static_cast<std::uint32_t>(parse_uint_field(fields[4], path, row, kColumns[4])));
    }
    if (!header_seen) throw std::runtime_error(path.string() + ": missing header row");
    if (data.step.empty()) throw std::runtime_error(path.string() + ": no data rows");
    return data;
}

namespace {

json series_stats(const std::vector<double>& log_price, const std::vector<double>& sigma,
                  const RunConfig& config) {
    json out;
    const ReturnSeries returns = daily_returns(log_price, config.model.steps_per_day);
    try {
        out["excess_kurtosis"] = excess_kurtosis(returns.values);
    } catch (const std::invalid_argument&) {
        out["excess_kurtosis"] = nullptr;
    }
    try {
        const std::vector<double> acf = volatility_acf(returns, config.acf_max_lag);
        double mean = 0.0;
        for (double v : acf) mean += v;
        mean /= static_cast<double>(acf.size());
        out["volatility_acf"] = acf;
        out["mean_volatility_acf"] = mean;
    } catch (const std::invalid_argument&) {
        out["volatility_acf"] = nullptr;
        out["mean_volatility_acf"] = nullptr;
    }
    try {
        out["tail_exponent"] = tail_exponent(returns.values, config.tail_fraction);
    } catch (const std::invalid_argument&) {
        out["tail_exponent"] = nullptr;
    }
    if (!sigma.empty()) {
        SimulationOutput shim;
        shim.sigma = sigma;
        shim.params = config.model;
        out["max_abs_sigma"] = max_abs_sigma(shim, config.window_years);
    }
    out["final_log_price"] = log_price.back();
    if (returns.values.size() >= 2) {
        double m = 0.0;
        for (double r : returns.values) m += r;
        m /= static_cast<double>(returns.values.size());
        double ss = 0.0;
        for (double r : returns.values) ss += (r - m) * (r - m);
        out["daily_return_std"] = std::sqrt(ss / static_cast<double>(returns.values.size() - 1));
    } else {
        out["daily_return_std"] = nullptr;
    }
    return out;
}

}  // namespace

json summarize_series(const std::vector<double>& model_log_price,
                      const std::vector<double>& baseline_log_price,
                      const std::vector<double>& sigma,
                      const std::vector<std::uint32_t>& switches, const RunConfig& config) {
    json summary;
    summary["schema"] = "herdsim-summary-v1";
    summary["seed"] = config.seed;
    summary["substream"] = 0;
    summary["config_hash"] = config_hash(config);
    summary["config"] = config_to_json(config);
    summary["steps"] = model_log_price.size() - 1;
    summary["model"] = series_stats(model_log_price, sigma, config);
    summary["baseline"] = series_stats(baseline_log_price, {}, config);
    double max_gap = 0.0;
    for (std::size_t n = 0; n < model_log_price.size(); ++n)
        max_gap = std::max(max_gap, std::abs(model_log_price[n] - baseline_log_price[n]));
    summary["max_log_price_gap"] = max_gap;
    summary["model_equals_baseline"] = max_gap <= 1e-12;
    std::uint64_t total = 0;
    for (std::uint32_t s : switches) total += s;
    summary["total_switches"] = total;
    return summary;
}

}  // namespace herdsim
