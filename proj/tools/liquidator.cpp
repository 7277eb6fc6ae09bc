// liquidator <solve|simulate|frontier|residual|lob> --config <file> [--out-dir <dir>] [--seed <u64>] [--paths <n>]
//
// Exit codes: 0 ok, 2 invalid config or parameters, 3 numerical failure, 1 anything else.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "liquidation/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal liquidation solvers and simulators"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool quiet = false;
    bool no_timestamp = false;

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "analytic curves and coefficients"},
        {"simulate", "Monte Carlo runs of the configured strategies"},
        {"frontier", "mean/std sweep over risk aversion"},
        {"residual", "first-order residual against the PDE solution"},
        {"lob", "market and limit order strategy runs"},
    };
    for (const auto& [name, about] : commands) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", config_path, "scenario JSON")->required();
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--seed", seed, "override simulation.seed");
        sub->add_option("--paths", paths, "override simulation.paths");
        sub->add_flag("--quiet", quiet, "skip console tables");
        sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp from the JSON report");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        liquidation::ScenarioConfig cfg = liquidation::load_config(config_path);
        liquidation::apply_overrides(cfg, {seed, paths});
        const liquidation::ReportBundle bundle = liquidation::run_command(command, cfg);
        const auto written = liquidation::write_bundle(bundle, out_dir, !no_timestamp);
        if (!quiet) {
            for (const auto& t : bundle.tables) {
                if (t.rows.size() <= 60) std::cout << liquidation::to_console(t) << '\n';
            }
        }
        for (const auto& p : written) std::cerr << "wrote " << p.string() << '\n';
        return 0;
    } catch (const liquidation::InvalidInput& e) {
        std::cerr << "invalid input: " << config_path << ": " << e.what() << '\n';
        return 2;
    } catch (const liquidation::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
