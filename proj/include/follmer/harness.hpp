#pragma once
// Experiment registry, configuration, and CSV emission.  Every experiment is
// deterministic given its configuration (including the worker count), and
// every CSV row records the tolerance rule its pass flag was computed from.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace follmer {

struct ExperimentConfig {
    std::string model_label = "inverse_bessel3";  // or "embedded_bessel4"
    std::optional<std::pair<double, double>> alpha;  // embedded-model shrinkage pair
    std::vector<double> t_values = {0.25, 1.0, 4.0};
    std::size_t n_paths = 100000;
    std::size_t n_steps_per_unit_time = 10000;
    double explosion_threshold = 1e-3;
    double epsilon_support = 0.05;
    std::uint64_t seed = 42;
    std::size_t workers = 0;  // 0: FOLLMER_LAB_WORKERS env var, then hardware
    std::string output_path = "results.csv";

    double dt() const { return 1.0 / static_cast<double>(n_steps_per_unit_time); }
};

// Flat key=value file with '#' comments; keys mirror the field names above.
// Unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig load_config(const std::string& path);
void apply_config_value(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

struct ResultRow {
    std::string experiment;
    std::string param;  // ';'-separated detail, never contains a comma
    std::optional<double> t;
    std::optional<double> estimate;
    std::optional<double> std_error;
    std::optional<double> oracle;
    std::optional<double> tolerance;
    bool pass = false;
    double seconds = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,param,t,estimate,stderr,oracle,tolerance,pass,seconds";

// Appends rows to a CSV file, writing the header first iff the file is new
// or empty.  Doubles are printed with %.17g so identical values round-trip
// to identical text.
void append_rows_csv(const std::string& path, const std::vector<ResultRow>& rows);

struct ExperimentInfo {
    std::string name;
    std::string description;
};
const std::vector<ExperimentInfo>& experiment_registry();

std::uint64_t fnv1a64(std::string_view text);

// Runs one registered experiment, appends its rows to config.output_path,
// and returns them.  Unknown names throw std::invalid_argument.  The
// experiment's random seed is config.seed ^ fnv1a64(name), so experiments
// decorrelate while each remains reproducible.
std::vector<ResultRow> run_experiment(const std::string& name,
                                      const ExperimentConfig& config);

struct RunSummary {
    std::vector<ResultRow> rows;
    std::size_t n_failed = 0;  // rows with pass == false
    std::size_t n_errors = 0;  // experiments that threw (reported as rows too)
    bool all_pass() const { return n_failed == 0 && n_errors == 0; }
};
// Runs every registered experiment in registry order, converting exceptions
// into failing rows without aborting the rest of the suite.
RunSummary run_all(const ExperimentConfig& config);

} // namespace follmer
