// magpair command line: simulate scenarios, compare controller stacks, sweep
// parameters, echo parsed configs.
#include <optional>
#include <string>
#include <vector>

#include <iostream>

#include <CLI11.hpp>

#include "magpair/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation of radial-distance control between two magnetic micro-agents"};
    app.require_subcommand(1);

    std::string config_path;
    std::string config_path_b;
    std::string parameter;
    std::vector<double> values;
    std::string out_dir;
    int stride = 0;

    auto* simulate = app.add_subcommand("simulate", "Run one scenario; write trace.csv and metrics.txt");
    simulate->add_option("--config", config_path, "Scenario config (JSON)")->required();
    simulate->add_option("--out", out_dir, "Output directory (overrides config)");
    simulate->add_option("--stride", stride, "Write every Nth step (overrides config)")
        ->check(CLI::PositiveNumber);

    auto* compare = app.add_subcommand("compare", "Run two configs differing only in controller stack");
    compare->add_option("config_a", config_path, "First config (JSON)")->required();
    compare->add_option("config_b", config_path_b, "Second config (JSON)")->required();
    compare->add_option("--out", out_dir, "Output directory (default: first config's output_dir)");

    auto* sweep = app.add_subcommand("sweep", "Re-run one config across values of one parameter");
    sweep->add_option("--config", config_path, "Scenario config (JSON)")->required();
    sweep->add_option("--param", parameter, "Parameter to vary")->required();
    sweep->add_option("--values", values, "Values to run")->delimiter(',');
    sweep->add_option("--out", out_dir, "Output directory (default: config's output_dir)");

    auto* print_config = app.add_subcommand("print-config", "Echo the parsed config as canonical JSON");
    print_config->add_option("--config", config_path, "Scenario config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return magpair::kExitConfig;
    }

    const auto out_override =
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
    try {
        if (simulate->parsed()) {
            const auto stride_override = stride > 0 ? std::optional<int>(stride) : std::nullopt;
            return magpair::cmd_simulate(config_path, out_override, stride_override);
        }
        if (compare->parsed()) {
            return magpair::cmd_compare(config_path, config_path_b, out_override);
        }
        if (sweep->parsed()) {
            return magpair::cmd_sweep(config_path, parameter, values, out_override);
        }
        return magpair::cmd_print_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return magpair::kExitConfig;
    }
}
