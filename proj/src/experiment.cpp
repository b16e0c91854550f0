#include "fasris/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fasris/log.hpp"
#include "fasris/sca.hpp"

namespace fasris::experiment {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "outage-vs-power", "convergence",       "rate-vs-ports",
        "rate-vs-meta-atoms", "rate-vs-width",  "rate-vs-power",
        "custom"};
    return names;
}

namespace {

const std::vector<std::string> kSchemes = {"proposed", "random", "fpa",
                                           "traditional_as", "fas_wo_ris"};

struct Preset {
    std::string variable;
    std::vector<double> values;
    std::vector<std::string> schemes;
};

Preset preset_for(const ExperimentConfig& config) {
    const std::string& name = config.experiment;
    if (name == "rate-vs-ports")
        return {"active_ports", {2, 4, 6, 8},
                {"proposed", "random", "traditional_as", "fpa"}};
    if (name == "rate-vs-meta-atoms")
        return {"n_ris", {25, 50, 100, 200},
                {"proposed", "random", "traditional_as", "fpa"}};
    if (name == "rate-vs-width")  // grid-based schemes degenerate at W = 1
        return {"normalized_width", {1, 2, 3, 4, 5},
                {"proposed", "random", "fas_wo_ris"}};
    if (name == "rate-vs-power")
        return {"p_max_dbm", {0, 5, 10, 15, 20},
                {"proposed", "fas_wo_ris", "random", "fpa"}};
    if (name == "outage-vs-power")
        return {"p_max_dbm", {0, 4, 8, 12, 16, 20},
                {"proposed", "fas_wo_ris", "random", "fpa"}};
    if (name == "convergence")
        return {"p_max_dbm", {10, 20}, {"proposed"}};
    return {config.sweep.variable, config.sweep.values,
            {"proposed", "random", "traditional_as", "fpa"}};
}

void apply_sweep_value(ScenarioConfig& scenario, const std::string& variable,
                       double value) {
    if (variable == "active_ports")
        scenario.active_ports = static_cast<int>(value);
    else if (variable == "n_ris")
        scenario.n_ris = static_cast<int>(value);
    else if (variable == "num_ports")
        scenario.num_ports = static_cast<int>(value);
    else if (variable == "n_interferers")
        scenario.n_interferers = static_cast<int>(value);
    else if (variable == "normalized_width")
        scenario.normalized_width = value;
    else if (variable == "p_max_dbm")
        scenario.p_max_dbm = value;
    else
        throw ConfigError("unknown sweep variable: " + variable);
}

sca::SCAParams make_params(const ExperimentConfig& config,
                           const ScenarioConfig& scenario) {
    sca::SCAParams params;
    params.max_iters = config.optimizer.max_iters;
    params.tolerance = config.optimizer.tolerance;
    params.step = config.optimizer.eta;
    params.regularization = config.optimizer.delta;
    params.trust_radius = config.optimizer.trust_radius;
    params.gamma_db = config.optimizer.gamma_db;
    params.noise_power = scenario.noise_power_w();
    params.solver.tol = config.optimizer.solver_tol;
    params.solver.max_iters = config.optimizer.solver_max_iters;
    return params;
}

// ---- JSON helpers ----

template <typename T>
void read_field(const json& obj, const char* key, T& into,
                std::vector<std::string>& problems) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const json::exception&) {
        problems.push_back(std::string("field '") + key + "' has the wrong type");
    }
}

void check_known_keys(const json& obj, const std::vector<std::string>& known,
                      const std::string& where,
                      std::vector<std::string>& problems) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& k : known) ok = ok || k == key;
        if (!ok) problems.push_back("unknown field '" + where + key + "'");
    }
}

const std::vector<std::string> kScenarioKeys = {
    "n_tx", "num_ports", "active_ports", "n_ris", "n_interferers",
    "tx_paths", "rx_paths", "rician_k", "ris_links_los_only",
    "normalized_width", "bandwidth_hz", "carrier_hz", "noise_psd_dbm_hz",
    "p_max_dbm", "interferer_power_dbm", "gain_1m", "exponent_los",
    "exponent_nlos", "bs_height_m", "uav_height_m", "ris_height_m",
    "uav_dist_min_m", "uav_dist_max_m", "ris_uav_offset_m",
    "interferer_ring_m", "interferer_cell_m"};

const std::vector<std::string> kOptimizerKeys = {
    "eta", "delta", "tolerance", "max_iters", "trust_radius", "gamma_db",
    "solver_tol", "solver_max_iters"};

const std::vector<std::string> kTopKeys = {
    "scenario", "optimizer", "sweep", "experiment", "schemes", "trials",
    "seed", "outage_threshold_bps", "baseline_draws", "timing", "workers"};

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig config;
    std::vector<std::string> problems;
    check_known_keys(root, kTopKeys, "", problems);

    if (root.contains("scenario")) {
        const json& sc = root["scenario"];
        check_known_keys(sc, kScenarioKeys, "scenario.", problems);
        auto& s = config.scenario;
        read_field(sc, "n_tx", s.n_tx, problems);
        read_field(sc, "num_ports", s.num_ports, problems);
        read_field(sc, "active_ports", s.active_ports, problems);
        read_field(sc, "n_ris", s.n_ris, problems);
        read_field(sc, "n_interferers", s.n_interferers, problems);
        read_field(sc, "tx_paths", s.tx_paths, problems);
        read_field(sc, "rx_paths", s.rx_paths, problems);
        read_field(sc, "rician_k", s.rician_k, problems);
        read_field(sc, "ris_links_los_only", s.ris_links_los_only, problems);
        read_field(sc, "normalized_width", s.normalized_width, problems);
        read_field(sc, "bandwidth_hz", s.bandwidth_hz, problems);
        read_field(sc, "carrier_hz", s.carrier_hz, problems);
        read_field(sc, "noise_psd_dbm_hz", s.noise_psd_dbm_hz, problems);
        read_field(sc, "p_max_dbm", s.p_max_dbm, problems);
        if (sc.contains("interferer_power_dbm") &&
            !sc["interferer_power_dbm"].is_null())
            read_field(sc, "interferer_power_dbm", s.interferer_power_dbm,
                       problems);
        read_field(sc, "gain_1m", s.gain_1m, problems);
        read_field(sc, "exponent_los", s.exponent_los, problems);
        read_field(sc, "exponent_nlos", s.exponent_nlos, problems);
        read_field(sc, "bs_height_m", s.bs_height_m, problems);
        read_field(sc, "uav_height_m", s.uav_height_m, problems);
        read_field(sc, "ris_height_m", s.ris_height_m, problems);
        read_field(sc, "uav_dist_min_m", s.uav_dist_min_m, problems);
        read_field(sc, "uav_dist_max_m", s.uav_dist_max_m, problems);
        read_field(sc, "ris_uav_offset_m", s.ris_uav_offset_m, problems);
        read_field(sc, "interferer_ring_m", s.interferer_ring_m, problems);
        read_field(sc, "interferer_cell_m", s.interferer_cell_m, problems);
    }
    if (root.contains("optimizer")) {
        const json& op = root["optimizer"];
        check_known_keys(op, kOptimizerKeys, "optimizer.", problems);
        auto& o = config.optimizer;
        read_field(op, "eta", o.eta, problems);
        read_field(op, "delta", o.delta, problems);
        read_field(op, "tolerance", o.tolerance, problems);
        read_field(op, "max_iters", o.max_iters, problems);
        read_field(op, "trust_radius", o.trust_radius, problems);
        read_field(op, "gamma_db", o.gamma_db, problems);
        read_field(op, "solver_tol", o.solver_tol, problems);
        read_field(op, "solver_max_iters", o.solver_max_iters, problems);
    }
    if (root.contains("sweep")) {
        const json& sw = root["sweep"];
        check_known_keys(sw, {"variable", "values"}, "sweep.", problems);
        read_field(sw, "variable", config.sweep.variable, problems);
        read_field(sw, "values", config.sweep.values, problems);
    }
    read_field(root, "experiment", config.experiment, problems);
    read_field(root, "schemes", config.schemes, problems);
    read_field(root, "trials", config.trials, problems);
    read_field(root, "seed", config.seed, problems);
    read_field(root, "outage_threshold_bps", config.outage_threshold_bps,
               problems);
    read_field(root, "baseline_draws", config.baseline_draws, problems);
    read_field(root, "timing", config.timing, problems);
    read_field(root, "workers", config.workers, problems);

    // validation, collecting every problem
    try {
        config.scenario.validate();
    } catch (const ConfigError& e) {
        problems.push_back(e.what());
    }
    bool known_experiment = false;
    for (const auto& name : experiment_names())
        known_experiment = known_experiment || name == config.experiment;
    if (!known_experiment)
        problems.push_back("unknown experiment '" + config.experiment + "'");
    if (config.experiment == "custom") {
        if (config.sweep.variable.empty() || config.sweep.values.empty())
            problems.push_back("custom experiment requires a sweep block");
        else {
            ScenarioConfig probe = config.scenario;
            try {
                apply_sweep_value(probe, config.sweep.variable,
                                  config.sweep.values.front());
            } catch (const ConfigError& e) {
                problems.push_back(e.what());
            }
        }
    }
    for (const auto& scheme : config.schemes) {
        bool ok = false;
        for (const auto& known : kSchemes) ok = ok || known == scheme;
        if (!ok) problems.push_back("unknown scheme '" + scheme + "'");
    }
    if (config.trials < 1) problems.push_back("trials must be >= 1");
    if (config.workers < 1) problems.push_back("workers must be >= 1");
    if (config.baseline_draws < 1)
        problems.push_back("baseline_draws must be >= 1");

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
    return config;
}

std::string config_to_json_text(const ExperimentConfig& config) {
    json root;
    const auto& s = config.scenario;
    json sc;
    sc["n_tx"] = s.n_tx;
    sc["num_ports"] = s.num_ports;
    sc["active_ports"] = s.active_ports;
    sc["n_ris"] = s.n_ris;
    sc["n_interferers"] = s.n_interferers;
    sc["tx_paths"] = s.tx_paths;
    sc["rx_paths"] = s.rx_paths;
    sc["rician_k"] = s.rician_k;
    sc["ris_links_los_only"] = s.ris_links_los_only;
    sc["normalized_width"] = s.normalized_width;
    sc["bandwidth_hz"] = s.bandwidth_hz;
    sc["carrier_hz"] = s.carrier_hz;
    sc["noise_psd_dbm_hz"] = s.noise_psd_dbm_hz;
    sc["p_max_dbm"] = s.p_max_dbm;
    if (!std::isnan(s.interferer_power_dbm))
        sc["interferer_power_dbm"] = s.interferer_power_dbm;
    sc["gain_1m"] = s.gain_1m;
    sc["exponent_los"] = s.exponent_los;
    sc["exponent_nlos"] = s.exponent_nlos;
    sc["bs_height_m"] = s.bs_height_m;
    sc["uav_height_m"] = s.uav_height_m;
    sc["ris_height_m"] = s.ris_height_m;
    sc["uav_dist_min_m"] = s.uav_dist_min_m;
    sc["uav_dist_max_m"] = s.uav_dist_max_m;
    sc["ris_uav_offset_m"] = s.ris_uav_offset_m;
    sc["interferer_ring_m"] = s.interferer_ring_m;
    sc["interferer_cell_m"] = s.interferer_cell_m;
    root["scenario"] = sc;
    json op;
    op["eta"] = config.optimizer.eta;
    op["delta"] = config.optimizer.delta;
    op["tolerance"] = config.optimizer.tolerance;
    op["max_iters"] = config.optimizer.max_iters;
    op["trust_radius"] = config.optimizer.trust_radius;
    op["gamma_db"] = config.optimizer.gamma_db;
    op["solver_tol"] = config.optimizer.solver_tol;
    op["solver_max_iters"] = config.optimizer.solver_max_iters;
    root["optimizer"] = op;
    if (!config.sweep.variable.empty()) {
        root["sweep"] = {{"variable", config.sweep.variable},
                         {"values", config.sweep.values}};
    }
    root["experiment"] = config.experiment;
    if (!config.schemes.empty()) root["schemes"] = config.schemes;
    root["trials"] = config.trials;
    root["seed"] = config.seed;
    root["outage_threshold_bps"] = config.outage_threshold_bps;
    root["baseline_draws"] = config.baseline_draws;
    root["timing"] = config.timing;
    root["workers"] = config.workers;
    return root.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return config_from_json_text(text.str());
}

namespace {

struct TrialCell {
    bool ok = false;
    double rate = 0.0;
    double iters = 0.0;
    double seconds = 0.0;
    std::vector<double> trace;  // convergence experiment only
};

// one trial evaluated across the whole sweep so designs can be chained
// along a power sweep and channels shared where shapes permit
void run_trial(const ExperimentConfig& config, const Preset& preset,
               const std::vector<std::string>& schemes, int trial,
               std::vector<std::vector<TrialCell>>& cells) {
    const bool chain = preset.variable == "p_max_dbm";
    std::map<std::string, sca::SCAResult> chained;

    for (std::size_t sv = 0; sv < preset.values.size(); ++sv) {
        ScenarioConfig scenario = config.scenario;
        apply_sweep_value(scenario, preset.variable, preset.values[sv]);
        const sca::SCAParams params = make_params(config, scenario);
        const double noise = scenario.noise_power_w();

        Rng channel_rng(substream(config.seed, trial, 101));
        const ChannelSet set = sample_scenario(scenario, channel_rng);
        const TransmitPowers powers = make_transmit_powers(scenario);
        const std::uint64_t draw_seed = substream(config.seed, trial, 202);

        baselines::SchemeResult trad;
        bool have_trad = false;

        for (std::size_t si = 0; si < schemes.size(); ++si) {
            TrialCell& cell = cells[sv * schemes.size() + si][trial];
            const std::string& scheme = schemes[si];
            try {
                baselines::SchemeResult result;
                if (scheme == "random") {
                    result = baselines::random_fas_ris(
                        set, powers, noise, scenario.active_ports, draw_seed,
                        config.baseline_draws);
                } else if (scheme == "fpa") {
                    result = baselines::fpa_baseline(set, powers, noise,
                                                     draw_seed,
                                                     config.baseline_draws);
                } else if (scheme == "traditional_as") {
                    result = baselines::traditional_as(set, powers, params,
                                                       draw_seed);
                    trad = result;
                    have_trad = true;
                } else if (scheme == "fas_wo_ris") {
                    sca::SCAInit start;
                    const sca::SCAInit* start_ptr = nullptr;
                    if (chain && chained.count(scheme)) {
                        start.theta0.theta.resize(0);
                        start.r0 = chained[scheme].ports;
                        start.r0.integer_mode = false;
                        start_ptr = &start;
                    }
                    result = baselines::fas_without_ris(
                        set, powers, params, scenario.active_ports, start_ptr);
                } else if (scheme == "proposed" &&
                           config.experiment == "convergence") {
                    // single run so the per-iteration trace is well defined
                    Rng phase_rng(substream(draw_seed, 0, 2));
                    sca::SCAInit init;
                    init.theta0.theta.resize(set.n_ris);
                    for (int i = 0; i < set.n_ris; ++i)
                        init.theta0.theta[i] = phase_rng.uniform(0.0, 2.0 * M_PI);
                    init.r0 =
                        spread_ports(scenario.active_ports, scenario.num_ports);
                    const sca::SCAResult run =
                        sca::run_sca(set, powers, params, init);
                    result.scheme = scheme;
                    result.rate = run.rate;
                    result.sinr = run.sinr;
                    result.theta = run.theta;
                    result.ports = run.ports;
                    result.iterations = run.iterations;
                    cell.trace = run.rate_history;
                } else if (scheme == "proposed") {
                    std::vector<sca::SCAInit> extra;
                    if (have_trad && trad.ports.size() == scenario.active_ports) {
                        sca::SCAInit refine;
                        refine.theta0 = trad.theta;
                        refine.r0 = trad.ports;
                        refine.r0.integer_mode = false;
                        extra.push_back(refine);
                    }
                    if (chain && chained.count(scheme)) {
                        sca::SCAInit carry;
                        carry.theta0 = chained[scheme].theta;
                        carry.r0 = chained[scheme].ports;
                        carry.r0.integer_mode = false;
                        extra.push_back(carry);
                    }
                    result = baselines::proposed(set, powers, params,
                                                 scenario.active_ports,
                                                 draw_seed, extra);
                } else {
                    throw ConfigError("unknown scheme " + scheme);
                }

                if (chain && (scheme == "proposed" || scheme == "fas_wo_ris")) {
                    sca::SCAResult carry;
                    carry.theta = result.theta;
                    carry.ports = result.ports;
                    chained[scheme] = carry;
                }

                cell.ok = true;
                cell.rate = result.rate;
                cell.iters = result.iterations;
                cell.seconds = result.seconds;
            } catch (const std::exception& e) {
                cell.ok = false;
                FASRIS_LOG_INFO("trial %d sweep %.6g scheme %s failed: %s",
                                trial, preset.values[sv], scheme.c_str(),
                                e.what());
            }
        }
    }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    const Preset preset = preset_for(config);
    const std::vector<std::string> schemes =
        config.schemes.empty() ? preset.schemes : config.schemes;

    std::vector<std::vector<TrialCell>> cells(
        preset.values.size() * schemes.size(),
        std::vector<TrialCell>(config.trials));

    std::atomic<int> next_trial{0};
    std::atomic<int> done{0};
    auto worker = [&]() {
        while (true) {
            const int trial = next_trial.fetch_add(1);
            if (trial >= config.trials) return;
            run_trial(config, preset, schemes, trial, cells);
            const int finished = done.fetch_add(1) + 1;
            FASRIS_LOG_INFO("experiment %s: trial %d/%d done",
                            config.experiment.c_str(), finished, config.trials);
        }
    };
    if (config.workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<ResultRow> rows;
    if (config.experiment == "convergence") {
        // one row per iteration index, padded with each trial's final rate
        for (std::size_t sv = 0; sv < preset.values.size(); ++sv) {
            for (std::size_t si = 0; si < schemes.size(); ++si) {
                const auto& cell_list = cells[sv * schemes.size() + si];
                std::size_t longest = 0;
                for (const auto& cell : cell_list)
                    if (cell.ok) longest = std::max(longest, cell.trace.size());
                char label[64];
                std::snprintf(label, sizeof label, "%s_p%gdbm",
                              schemes[si].c_str(), preset.values[sv]);
                for (std::size_t it = 0; it < longest; ++it) {
                    ResultRow row;
                    row.sweep_value = static_cast<double>(it);
                    row.scheme = label;
                    double sum = 0.0, sum_sq = 0.0;
                    int n = 0;
                    for (const auto& cell : cell_list) {
                        if (!cell.ok || cell.trace.empty()) continue;
                        const double value =
                            it < cell.trace.size() ? cell.trace[it]
                                                   : cell.trace.back();
                        sum += value;
                        sum_sq += value * value;
                        ++n;
                    }
                    row.failures = config.trials - n;
                    if (n > 0) row.rate_mean = sum / n;
                    if (n > 1)
                        row.rate_std = std::sqrt(
                            std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)));
                    rows.push_back(row);
                }
            }
        }
        return rows;
    }

    for (std::size_t sv = 0; sv < preset.values.size(); ++sv) {
        for (std::size_t si = 0; si < schemes.size(); ++si) {
            const auto& cell_list = cells[sv * schemes.size() + si];
            ResultRow row;
            row.sweep_value = preset.values[sv];
            row.scheme = schemes[si];
            double sum = 0.0, sum_sq = 0.0, iters = 0.0, seconds = 0.0;
            int n = 0, below = 0;
            for (const auto& cell : cell_list) {
                if (!cell.ok) {
                    ++row.failures;
                    continue;
                }
                sum += cell.rate;
                sum_sq += cell.rate * cell.rate;
                iters += cell.iters;
                seconds += cell.seconds;
                if (cell.rate < config.outage_threshold_bps) ++below;
                ++n;
            }
            if (n > 0) {
                row.rate_mean = sum / n;
                row.outage = static_cast<double>(below) / n;
                row.iters = iters / n;
                row.seconds = config.timing ? seconds / n : 0.0;
            }
            if (n > 1)
                row.rate_std = std::sqrt(
                    std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)));
            rows.push_back(row);
        }
    }
    return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "sweep,scheme,rate_mean,rate_std,outage,iters,seconds,failures\n";
    char buffer[256];
    for (const auto& row : rows) {
        std::snprintf(buffer, sizeof buffer,
                      "%.6g,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%d\n", row.sweep_value,
                      row.scheme.c_str(), row.rate_mean, row.rate_std,
                      row.outage, row.iters, row.seconds, row.failures);
        os << buffer;
    }
}

void emit_csv_file(const std::vector<ResultRow>& rows,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    emit_csv(rows, out);
}

void emit_plot_script(const std::vector<ResultRow>& rows,
                      const std::string& csv_name, const std::string& path) {
    (void)rows;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot script: " + path);
    out << "#!/usr/bin/env python3\n"
        << "# plots one curve per scheme from the results CSV; writes\n"
        << "# <csv>_rate.png and <csv>_outage.png next to it\n"
        << "import csv, sys\n"
        << "from collections import defaultdict\n"
        << "import matplotlib\n"
        << "matplotlib.use('Agg')\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "path = sys.argv[1] if len(sys.argv) > 1 else '" << csv_name << "'\n"
        << "rows = list(csv.DictReader(open(path)))\n"
        << "for column, logy in (('rate_mean', False), ('outage', True)):\n"
        << "    series = defaultdict(list)\n"
        << "    for row in rows:\n"
        << "        series[row['scheme']].append((float(row['sweep']), float(row[column])))\n"
        << "    plt.figure()\n"
        << "    for scheme, points in sorted(series.items()):\n"
        << "        points.sort()\n"
        << "        plt.plot([p[0] for p in points], [p[1] for p in points],\n"
        << "                 marker='o', label=scheme)\n"
        << "    plt.xlabel('sweep value')\n"
        << "    plt.ylabel(column)\n"
        << "    if logy and any(p[1] > 0 for pts in series.values() for p in pts):\n"
        << "        plt.yscale('log')\n"
        << "    plt.grid(True, alpha=0.4)\n"
        << "    plt.legend()\n"
        << "    plt.tight_layout()\n"
        << "    target = path.rsplit('.csv', 1)[0] + '_' + column + '.png'\n"
        << "    plt.savefig(target, dpi=150)\n"
        << "    print('wrote', target)\n";
}

bool failure_budget_exceeded(const std::vector<ResultRow>& rows, int trials) {
    for (const auto& row : rows)
        if (row.failures * 5 > trials) return true;  // more than 20% failed
    return false;
}

}  // namespace fasris::experiment
