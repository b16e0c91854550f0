#ifndef FASRIS_EXPERIMENT_HPP
#define FASRIS_EXPERIMENT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fasris/baselines.hpp"
#include "fasris/channel.hpp"

namespace fasris::experiment {

struct OptimizerConfig {
    double eta = 0.5;
    double delta = 0.001;
    double tolerance = 0.001;
    int max_iters = 50;
    double trust_radius = 1.0;
    double gamma_db = 0.0;
    double solver_tol = 2e-6;
    int solver_max_iters = 4000;
};

struct SweepConfig {
    std::string variable;        // names a scenario field
    std::vector<double> values;  // one result row group per value
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    OptimizerConfig optimizer;
    SweepConfig sweep;  // used when experiment == "custom"
    std::string experiment = "rate-vs-ports";
    std::vector<std::string> schemes;  // empty: experiment default
    int trials = 200;
    std::uint64_t seed = 1;
    double outage_threshold_bps = 4.0;
    int baseline_draws = 100;
    bool timing = false;  // real seconds in the CSV (not byte-reproducible)
    int workers = 1;
};

// Known experiment names, each reproducing one reference sweep.
const std::vector<std::string>& experiment_names();

// JSON <-> config. Parsing applies defaults for absent fields, rejects
// unknown keys and reports every validation problem at once (ConfigError).
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
    double sweep_value = 0.0;
    std::string scheme;
    double rate_mean = 0.0;
    double rate_std = 0.0;
    double outage = 0.0;
    double iters = 0.0;
    double seconds = 0.0;
    int failures = 0;
};

std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// header sweep,scheme,rate_mean,rate_std,outage,iters,seconds,failures with
// numbers at 6 significant digits
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_csv_file(const std::vector<ResultRow>& rows, const std::string& path);

// standalone python script that plots the CSV
void emit_plot_script(const std::vector<ResultRow>& rows,
                      const std::string& csv_name, const std::string& path);

// fraction of (sweep value, scheme) cells whose failure count exceeded the
// per-cell trial budget; used for the CLI exit status
bool failure_budget_exceeded(const std::vector<ResultRow>& rows, int trials);

}  // namespace fasris::experiment

#endif
