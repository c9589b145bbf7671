#include "herdsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace herdsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument("config key '" + key + "': " + what);
}

double get_real(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& doc, const char* key, std::uint64_t fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& doc, const char* key, const std::string& fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "h",           "kappa",         "alpha",         "num_agents",
        "steps_per_day", "reset_lo",    "reset_hi",      "herding_lo",
        "herding_hi",  "delta",         "initial_price", "initial_sigma",
        "weights",     "horizon_years", "window_years",  "cmax_values",
        "runs_per_point", "seed",       "output_dir",    "snapshot_times",
        "acf_max_lag", "tail_fraction", "density_bins",  "engine"};
    return keys;
}

}  // namespace

void RunConfig::validate() const {
    model.validate();
    if (!(horizon_years > 0.0)) throw std::invalid_argument("config key 'horizon_years': must be positive");
    if (!(window_years > 0.0)) throw std::invalid_argument("config key 'window_years': must be positive");
    if (window_years > horizon_years)
        throw std::invalid_argument("config key 'window_years': exceeds horizon_years");
    for (double c : cmax_values)
        if (!(c >= 0.0)) throw std::invalid_argument("config key 'cmax_values': entries must be >= 0");
    if (runs_per_point < 1)
        throw std::invalid_argument("config key 'runs_per_point': must be at least 1");
    if (output_dir.empty())
        throw std::invalid_argument("config key 'output_dir': must not be empty");
    if (acf_max_lag < 1) throw std::invalid_argument("config key 'acf_max_lag': must be at least 1");
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5))
        throw std::invalid_argument("config key 'tail_fraction': must lie in (0, 0.5]");
    if (density_bins < 1)
        throw std::invalid_argument("config key 'density_bins': must be at least 1");
    for (double t : snapshots.times_years)
        if (!(t > 0.0) || t > horizon_years)
            throw std::invalid_argument(
                "config key 'snapshot_times': entries must lie in (0, horizon_years]");
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known_keys().contains(key))
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    RunConfig c;
    c.model.h = get_real(doc, "h", c.model.h);
    c.model.kappa = get_real(doc, "kappa", c.model.kappa);
    c.model.alpha = get_real(doc, "alpha", c.model.alpha);
    c.model.num_agents = static_cast<std::uint32_t>(get_uint(doc, "num_agents", c.model.num_agents));
    c.model.steps_per_day =
        static_cast<std::uint32_t>(get_uint(doc, "steps_per_day", c.model.steps_per_day));
    c.model.reset_lo = get_real(doc, "reset_lo", c.model.reset_lo);
    c.model.reset_hi = get_real(doc, "reset_hi", c.model.reset_hi);
    c.model.herding_lo = get_real(doc, "herding_lo", c.model.herding_lo);
    c.model.herding_hi = get_real(doc, "herding_hi", c.model.herding_hi);
    c.model.delta = get_real(doc, "delta", c.model.delta);
    c.model.initial_price = get_real(doc, "initial_price", c.model.initial_price);
    c.model.initial_sigma = get_real(doc, "initial_sigma", c.model.initial_sigma);
    if (doc.contains("weights")) {
        const json& w = doc.at("weights");
        if (w.is_string()) {
            if (w.get<std::string>() != "unit") fail("weights", "expected \"unit\" or an array");
        } else if (w.is_array()) {
            for (const auto& x : w)
                if (!x.is_number()) fail("weights", "entries must be numbers");
            c.model.weights = w.get<std::vector<double>>();
        } else {
            fail("weights", "expected \"unit\" or an array");
        }
    }
    c.horizon_years = get_real(doc, "horizon_years", c.horizon_years);
    c.window_years = get_real(doc, "window_years", c.window_years);
    if (doc.contains("cmax_values")) {
        const json& v = doc.at("cmax_values");
        if (!v.is_array()) fail("cmax_values", "expected an array");
        c.cmax_values = v.get<std::vector<double>>();
    }
    c.runs_per_point =
        static_cast<std::uint32_t>(get_uint(doc, "runs_per_point", c.runs_per_point));
    c.seed = get_uint(doc, "seed", c.seed);
    c.output_dir = get_string(doc, "output_dir", c.output_dir);
    c.density_bins = static_cast<std::uint32_t>(get_uint(doc, "density_bins", c.density_bins));
    if (doc.contains("snapshot_times")) {
        const json& v = doc.at("snapshot_times");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto")
                fail("snapshot_times", "expected \"auto\" or an array of years");
            c.snapshots = SnapshotRequest::automatic(c.density_bins);
        } else if (v.is_array()) {
            if (!v.empty())
                c.snapshots = SnapshotRequest::at(v.get<std::vector<double>>(), c.density_bins);
        } else {
            fail("snapshot_times", "expected \"auto\" or an array of years");
        }
    }
    c.snapshots.bins = c.density_bins;
    c.acf_max_lag = static_cast<std::uint32_t>(get_uint(doc, "acf_max_lag", c.acf_max_lag));
    c.tail_fraction = get_real(doc, "tail_fraction", c.tail_fraction);
    const std::string engine = get_string(doc, "engine", "parallel");
    if (engine == "parallel")
        c.engine = Engine::parallel;
    else if (engine == "serial")
        c.engine = Engine::serial;
    else
        fail("engine", "expected \"parallel\" or \"serial\"");

    c.validate();
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: malformed JSON in " + path.string() + ": " +
                                    e.what());
    }
    return config_from_json(doc);
}

nlohmann::json config_to_json(const RunConfig& c) {
    json doc;
    doc["h"] = c.model.h;
    doc["kappa"] = c.model.kappa;
    doc["alpha"] = c.model.alpha;
    doc["num_agents"] = c.model.num_agents;
    doc["steps_per_day"] = c.model.steps_per_day;
    doc["reset_lo"] = c.model.reset_lo;
    doc["reset_hi"] = c.model.reset_hi;
    doc["herding_lo"] = c.model.herding_lo;
    doc["herding_hi"] = c.model.herding_hi;
    doc["delta"] = c.model.delta;
    doc["initial_price"] = c.model.initial_price;
    doc["initial_sigma"] = c.model.initial_sigma;
    if (c.model.weights.empty())
        doc["weights"] = "unit";
    else
        doc["weights"] = c.model.weights;
    doc["horizon_years"] = c.horizon_years;
    doc["window_years"] = c.window_years;
    doc["cmax_values"] = c.cmax_values;
    doc["runs_per_point"] = c.runs_per_point;
    doc["seed"] = c.seed;
    doc["output_dir"] = c.output_dir;
    switch (c.snapshots.mode) {
        case SnapshotRequest::Mode::none:
            doc["snapshot_times"] = json::array();
            break;
        case SnapshotRequest::Mode::at_times:
            doc["snapshot_times"] = c.snapshots.times_years;
            break;
        case SnapshotRequest::Mode::auto_pick:
            doc["snapshot_times"] = "auto";
            break;
    }
    doc["acf_max_lag"] = c.acf_max_lag;
    doc["tail_fraction"] = c.tail_fraction;
    doc["density_bins"] = c.density_bins;
    doc["engine"] = c.engine == Engine::parallel ? "parallel" : "serial";
    return doc;
}

std::string config_hash(const RunConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace herdsim
