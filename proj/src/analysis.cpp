#include "fasris/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace fasris::analysis {

OutageEstimate estimate_outage(const std::function<double(Rng&)>& rate_sampler,
                               double threshold, long trials, Rng& rng) {
    if (trials < 1) throw std::domain_error("estimate_outage: trials must be >= 1");
    long below = 0;
    for (long t = 0; t < trials; ++t)
        if (rate_sampler(rng) < threshold) ++below;
    OutageEstimate out;
    out.threshold = threshold;
    out.trials = trials;
    out.probability = static_cast<double>(below) / trials;
    out.half_width =
        1.96 * std::sqrt(out.probability * (1.0 - out.probability) / trials);
    return out;
}

OutageEstimate estimate_outage_sinr(
    const std::function<double(Rng&)>& rate_sampler, double sinr_threshold,
    long trials, Rng& rng) {
    OutageEstimate out = estimate_outage(
        rate_sampler, std::log2(1.0 + sinr_threshold), trials, rng);
    out.threshold = sinr_threshold;
    out.threshold_is_rate = false;
    return out;
}

OutageEstimate estimate_outage_fixed(const ScenarioConfig& config,
                                     const PhaseShiftVector& theta,
                                     const PortSelection& ports,
                                     double threshold, long trials,
                                     std::uint64_t seed) {
    const TransmitPowers powers = make_transmit_powers(config);
    const double noise = config.noise_power_w();
    long trial_index = 0;
    auto sampler = [&](Rng&) {
        Rng trial_rng(substream(seed, static_cast<std::uint64_t>(trial_index++)));
        const ChannelSet set = sample_scenario(config, trial_rng);
        return evaluate_rate(set, ports, theta, powers, noise);
    };
    Rng unused(0);
    return estimate_outage(sampler, threshold, trials, unused);
}

std::pair<double, double> los_gains(const ScenarioGeometry& geometry,
                                    double gain_1m, int k) {
    const double d_direct = geometry.dist_interferer_uav(k);
    const double d_to_surface = geometry.dist_interferer_ris(k);
    const double d_surface_rx = geometry.dist_ris_uav();
    if (d_direct <= 0.0 || d_to_surface <= 0.0 || d_surface_rx <= 0.0)
        throw std::domain_error("los_gains: zero distance");
    const double direct = std::sqrt(gain_1m) / d_direct;
    const double cascaded_per_element = gain_1m / (d_to_surface * d_surface_rx);
    return {direct, cascaded_per_element};
}

int nulling_min_elements(double dist_ris_uav, double gain_1m) {
    if (gain_1m <= 0.0 || dist_ris_uav <= 0.0)
        throw std::domain_error("nulling_min_elements: positive inputs required");
    return static_cast<int>(std::ceil(dist_ris_uav / std::sqrt(gain_1m)));
}

bool check_nulling_feasible(const ScenarioGeometry& geometry, int n_ris,
                            double gain_1m, int k) {
    const auto [direct, per_element] = los_gains(geometry, gain_1m, k);
    return n_ris * per_element >= direct;
}

NullingReport nulling_report(const ScenarioGeometry& geometry, int n_ris,
                             double gain_1m, int k) {
    NullingReport report;
    const auto [direct, per_element] = los_gains(geometry, gain_1m, k);
    report.direct_gain = direct;
    report.cascaded_gain = n_ris * per_element;
    report.feasible = report.cascaded_gain >= report.direct_gain;
    report.n_min = nulling_min_elements(geometry.dist_ris_uav(), gain_1m);
    return report;
}

double per_iteration_flops(int num_interferers, int n_ris, int paths) {
    if (num_interferers < 0 || n_ris < 0 || paths < 0)
        throw std::domain_error("per_iteration_flops: negative argument");
    const double k = num_interferers;
    const double n = n_ris;
    const double l = paths;
    return 2.0 * std::sqrt(4.0 + n) * (1.0 + k + n) *
           (4.0 + 16.0 * k + 8.0 * n + 20.0 * k * k + 8.0 * k * l +
            4.0 * n * n);
}

ConvergenceReport convergence_report(const std::vector<double>& rate_trace,
                                     double tolerance) {
    if (rate_trace.empty())
        throw std::domain_error("convergence_report: empty trace");
    ConvergenceReport report;
    report.iterations_to_tolerance = static_cast<int>(rate_trace.size()) - 1;
    bool found = false;
    for (std::size_t i = 1; i < rate_trace.size(); ++i) {
        const double delta = rate_trace[i] - rate_trace[i - 1];
        report.max_decrease = std::max(report.max_decrease, -delta);
        if (!found && std::abs(delta) < tolerance) {
            report.iterations_to_tolerance = static_cast<int>(i);
            found = true;
        }
    }
    if (rate_trace.size() >= 2)
        report.final_delta =
            std::abs(rate_trace.back() - rate_trace[rate_trace.size() - 2]);
    return report;
}

}  // namespace fasris::analysis
