#include "herdsim/commands.hpp"
#include "herdsim/config.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"herdsim: threshold-agent market simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (defaults apply if omitted)");
        cmd->add_option("--seed", seed_override, "override the config seed");
        cmd->add_option("--out", out_override, "override the output directory");
    };

    CLI::App* simulate = app.add_subcommand(
        "simulate", "one run: prices.csv, daily_returns.csv, summary.json");
    add_run_flags(simulate);
    CLI::App* sweep =
        app.add_subcommand("sweep", "herding-strength sweep over cmax_values: sweep.csv");
    add_run_flags(sweep);

    std::string analyze_input, analyze_out;
    CLI::App* analyze =
        app.add_subcommand("analyze", "recompute summary.json from a stored prices.csv");
    analyze->add_option("--input", analyze_input, "run directory (or prices.csv path)")
        ->required();
    analyze->add_option("--out", analyze_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return herdsim::cmd_analyze(analyze_input, analyze_out);

        herdsim::RunConfig config = config_path.empty()
                                        ? herdsim::RunConfig{}
                                        : herdsim::parse_config(config_path);
        if (config_path.empty()) config.validate();
        if (seed_override) config.seed = *seed_override;
        if (out_override) config.output_dir = *out_override;
        if (simulate->parsed()) return herdsim::cmd_simulate(config);
        return herdsim::cmd_sweep(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
