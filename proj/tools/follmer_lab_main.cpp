// follmer-lab: command-line driver for the experiment registry.
//
//   follmer-lab list
//   follmer-lab run <experiment> [--key value]...
//   follmer-lab run-all [--config file] [--key value]...
//
// Flags mirror the configuration keys; --config loads a key=value file first
// and explicit flags override it.  Exit codes: 0 all rows pass, 1 at least
// one row failed, 2 usage or configuration error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "follmer/harness.hpp"

namespace {

struct CliState {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // in flag order
};

void add_config_options(CLI::App* cmd, CliState& state) {
    cmd->add_option_function<std::string>(
        "--config", [&state](const std::string& value) { state.config_path = value; },
        "key=value configuration file applied before the flags below");
    static constexpr struct {
        const char* key;
        const char* flag;
        const char* help;
    } kKeys[] = {
        {"model_label", "--model_label", "inverse_bessel3 or embedded_bessel4"},
        {"alpha", "--alpha", "shrinkage pair for the embedded model, e.g. 1,1"},
        {"t_values", "--t_values", "comma-separated horizons, e.g. 0.25,1,4"},
        {"n_paths", "--n_paths", "Monte Carlo paths"},
        {"n_steps_per_unit_time", "--n_steps_per_unit_time", "grid resolution (dt = 1/steps)"},
        {"explosion_threshold", "--explosion_threshold", "h level treated as the zero set"},
        {"epsilon_support", "--epsilon_support", "support width for the singular-part sweep"},
        {"seed", "--seed", "base random seed"},
        {"workers", "--workers", "worker threads (0: FOLLMER_LAB_WORKERS, then hardware)"},
        {"output_path", "--output_path,--csv", "CSV file the rows are appended to"},
    };
    for (const auto& entry : kKeys) {
        cmd->add_option_function<std::string>(
            entry.flag,
            [&state, key = entry.key](const std::string& value) {
                state.overrides.emplace_back(key, value);
            },
            entry.help);
    }
}

std::size_t print_rows(const std::vector<follmer::ResultRow>& rows) {
    std::size_t failed = 0;
    for (const auto& row : rows) {
        if (!row.pass) ++failed;
        std::string detail;
        auto append = [&detail](const char* name, const std::optional<double>& value) {
            if (!value) return;
            char buffer[64];
            std::snprintf(buffer, sizeof buffer, "%s%s=%.6g", detail.empty() ? "" : " ", name,
                          *value);
            detail += buffer;
        };
        append("t", row.t);
        append("estimate", row.estimate);
        append("stderr", row.std_error);
        append("oracle", row.oracle);
        append("tol", row.tolerance);
        std::printf("[%s] %-19s %s | %s (%.3fs)\n", row.pass ? "PASS" : "FAIL",
                    row.experiment.c_str(), row.param.c_str(), detail.c_str(), row.seconds);
    }
    return failed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Monte Carlo and quadrature experiments for reciprocal-distance strict local "
        "martingales: measure change, filtration shrinkage, and the singular decomposition"};
    app.require_subcommand(1);

    CliState state;
    CLI::App* list_cmd = app.add_subcommand("list", "List registered experiments");
    std::string experiment_name;
    CLI::App* run_cmd =
        app.add_subcommand("run", "Run one experiment and append its rows to the CSV");
    run_cmd->add_option("experiment", experiment_name, "registered experiment name")
        ->required();
    add_config_options(run_cmd, state);
    CLI::App* run_all_cmd =
        app.add_subcommand("run-all", "Run every registered experiment in order");
    add_config_options(run_all_cmd, state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return 2;
    }

    if (list_cmd->parsed()) {
        for (const auto& info : follmer::experiment_registry()) {
            std::printf("%-20s %s\n", info.name.c_str(), info.description.c_str());
        }
        return 0;
    }

    follmer::ExperimentConfig config;
    try {
        if (state.config_path) config = follmer::load_config(*state.config_path);
        for (const auto& [key, value] : state.overrides) {
            follmer::apply_config_value(config, key, value);
        }
    } catch (const std::exception& error) {
        std::fprintf(stderr, "configuration error: %s\n", error.what());
        return 2;
    }

    try {
        std::vector<follmer::ResultRow> rows;
        if (run_cmd->parsed()) {
            rows = follmer::run_experiment(experiment_name, config);
        } else {
            rows = follmer::run_all(config).rows;
        }
        const std::size_t failed = print_rows(rows);
        std::printf("%zu row(s), %zu failed; CSV appended to %s\n", rows.size(), failed,
                    config.output_path.c_str());
        return failed == 0 ? 0 : 1;
    } catch (const std::invalid_argument& error) {
        std::fprintf(stderr, "configuration error: %s\n", error.what());
        return 2;
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 2;
    }
}
