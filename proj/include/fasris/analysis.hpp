#ifndef FASRIS_ANALYSIS_HPP
#define FASRIS_ANALYSIS_HPP

#include <functional>
#include <vector>

#include "fasris/channel.hpp"
#include "fasris/link_metrics.hpp"

namespace fasris::analysis {

struct OutageEstimate {
    double threshold = 0.0;        // bps/Hz (or linear SINR, per the flag)
    bool threshold_is_rate = true;
    double probability = 0.0;      // empirical P(rate < threshold)
    long trials = 0;
    double half_width = 0.0;       // 95% binomial confidence half-width
};

// Monte-Carlo outage over an arbitrary per-trial rate sampler.
OutageEstimate estimate_outage(const std::function<double(Rng&)>& rate_sampler,
                               double threshold, long trials, Rng& rng);

// same estimator with the threshold given as a linear SINR target
OutageEstimate estimate_outage_sinr(
    const std::function<double(Rng&)>& rate_sampler, double sinr_threshold,
    long trials, Rng& rng);

// Outage of a fixed design evaluated over fresh channel realizations.
OutageEstimate estimate_outage_fixed(const ScenarioConfig& config,
                                     const PhaseShiftVector& theta,
                                     const PortSelection& ports,
                                     double threshold, long trials,
                                     std::uint64_t seed);

struct NullingReport {
    double direct_gain = 0.0;     // per-interferer direct amplitude
    double cascaded_gain = 0.0;   // N elements through the surface
    bool feasible = false;        // cascaded >= direct
    int n_min = 0;
};

// (direct, cascaded-per-element) LoS amplitudes for interferer k
std::pair<double, double> los_gains(const ScenarioGeometry& geometry,
                                    double gain_1m, int k);

// smallest element count that can null interferer k when the interferer's
// distances to the receiver and to the surface coincide
int nulling_min_elements(double dist_ris_uav, double gain_1m);

bool check_nulling_feasible(const ScenarioGeometry& geometry, int n_ris,
                            double gain_1m, int k);

NullingReport nulling_report(const ScenarioGeometry& geometry, int n_ris,
                             double gain_1m, int k);

// flop estimate for one convex subproblem solve
double per_iteration_flops(int num_interferers, int n_ris, int paths);

struct ConvergenceReport {
    int iterations_to_tolerance = 0;  // first step whose |delta| < tolerance
    double max_decrease = 0.0;        // largest single-step drop
    double final_delta = 0.0;
};

ConvergenceReport convergence_report(const std::vector<double>& rate_trace,
                                     double tolerance = 1e-3);

}  // namespace fasris::analysis

#endif
