#include <CLI11.hpp>
#include <iostream>

#include "fasris/baselines.hpp"
#include "fasris/experiment.hpp"
#include "fasris/log.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& plot_path, long seed, const std::string& name,
            int trials, int workers) {
    auto config = fasris::experiment::load_config(config_path);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!name.empty()) config.experiment = name;
    if (trials > 0) config.trials = trials;
    if (workers > 0) config.workers = workers;

    const auto rows = fasris::experiment::run_experiment(config);
    fasris::experiment::emit_csv(rows, std::cout);
    if (!out_path.empty()) {
        fasris::experiment::emit_csv_file(rows, out_path);
        FASRIS_LOG_INFO("wrote %s", out_path.c_str());
    }
    if (!plot_path.empty()) {
        fasris::experiment::emit_plot_script(
            rows, out_path.empty() ? "results.csv" : out_path, plot_path);
        FASRIS_LOG_INFO("wrote %s", plot_path.c_str());
    }
    if (fasris::experiment::failure_budget_exceeded(rows, config.trials)) {
        std::cerr << "error: solver-failure budget exceeded\n";
        return 3;
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, int phase_levels, long budget,
               long seed) {
    auto config = fasris::experiment::load_config(config_path);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    fasris::Rng rng(fasris::substream(config.seed, 0, 101));
    const auto set = fasris::sample_scenario(config.scenario, rng);
    const auto powers = fasris::make_transmit_powers(config.scenario);
    const auto best = fasris::baselines::exhaustive_oracle(
        set, powers, config.scenario.noise_power_w(),
        config.scenario.active_ports, phase_levels,
        static_cast<std::uint64_t>(budget));
    std::cout << "oracle rate: " << best.rate << " bps/Hz\n"
              << "oracle sinr: " << best.sinr << "\n"
              << "ports:";
    for (int i = 0; i < best.ports.size(); ++i)
        std::cout << ' ' << best.ports.r[i];
    std::cout << "\nphases:";
    for (int i = 0; i < best.theta.size(); ++i)
        std::cout << ' ' << best.theta.theta[i];
    std::cout << "\nevaluations: " << best.evaluations << "\n"
              << "seconds: " << best.seconds << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const auto config = fasris::experiment::load_config(config_path);
    std::cout << "config OK: experiment " << config.experiment << ", "
              << config.trials << " trials, seed " << config.seed << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluid-antenna and reflecting-surface downlink simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, plot_path, experiment;
    long seed = -1, budget = 10'000'000;
    int trials = 0, workers = 0, phase_levels = 8;

    auto* run = app.add_subcommand("run", "run an experiment sweep");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_path, "CSV output path");
    run->add_option("--plot-script", plot_path, "emit a python plot script");
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--experiment", experiment, "override the experiment name");
    run->add_option("--trials", trials, "override the trial count");
    run->add_option("--workers", workers, "worker thread count");

    auto* oracle = app.add_subcommand("oracle", "small-instance exact optimum");
    oracle->add_option("config", config_path, "JSON config file")->required();
    oracle->add_option("--phase-levels", phase_levels, "phase grid size");
    oracle->add_option("--budget", budget, "evaluation budget");
    oracle->add_option("--seed", seed, "override the config seed");

    auto* validate = app.add_subcommand("validate", "check a config file");
    validate->add_option("config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_path, plot_path, seed, experiment,
                           trials, workers);
        if (oracle->parsed())
            return cmd_oracle(config_path, phase_levels, budget, seed);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const fasris::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
