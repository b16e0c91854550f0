#ifndef FASRIS_LINK_METRICS_HPP
#define FASRIS_LINK_METRICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "fasris/channel.hpp"

namespace fasris {

// Per-element phase shifts of the reflecting surface; unit amplitude.
struct PhaseShiftVector {
    Eigen::VectorXd theta;  // radians, each in [0, 2*pi)

    int size() const { return static_cast<int>(theta.size()); }
    static PhaseShiftVector zeros(int n) {
        return {Eigen::VectorXd::Zero(n)};
    }
    // complex unit-circle representation exp(j*theta)
    Eigen::VectorXcd unit_vector() const;
};

// wraps an angle into [0, 2*pi)
double wrap_angle(double theta);

// Active-port indices, ascending. Relaxed (fractional) while optimizing;
// integer_mode marks a selection that has been snapped to the grid.
struct PortSelection {
    Eigen::VectorXd r;
    bool integer_mode = false;

    int size() const { return static_cast<int>(r.size()); }
    // checks 1 <= r_1 < ... < r_m <= M (gaps >= 1 in integer mode)
    void check(int num_ports) const;
};

// evenly spread initial selection covering [1, M]
PortSelection spread_ports(int active, int num_ports);

struct EffectiveChannels {
    Eigen::MatrixXcd ell_bs;               // m_l x n_tx
    std::vector<Eigen::MatrixXcd> ell_k;   // each m_l x n_tx
};

// diag(exp(j*theta_i))
Eigen::MatrixXcd reflection_matrix(const PhaseShiftVector& theta);

// surface cascade H_d^H * diag(v) * G for an arbitrary complex weight vector
Eigen::MatrixXcd ris_cascade(const Eigen::MatrixXcd& h_d,
                             const Eigen::VectorXcd& v,
                             const Eigen::MatrixXcd& g);

// H_direct + H_d^H * diag(exp(j*theta)) * G
Eigen::MatrixXcd effective_channel(const Eigen::MatrixXcd& h_direct,
                                   const Eigen::MatrixXcd& h_d,
                                   const PhaseShiftVector& theta,
                                   const Eigen::MatrixXcd& g);

EffectiveChannels build_effective_channels(const Channels& channels,
                                           const PhaseShiftVector& theta);

// y = ell_bs*p_bs*x_bs + sum_k ell_k*p_k*x_k + noise
Eigen::VectorXcd received_signal(const EffectiveChannels& ell,
                                 const TransmitPowers& powers,
                                 const std::complex<double>& symbol_bs,
                                 const std::vector<std::complex<double>>& symbols_k,
                                 const Eigen::VectorXcd& noise);

// ||ell_bs p_bs||^2 / (sum_k ||ell_k p_k||^2 + m_l * noise_power)
double compute_sinr(const EffectiveChannels& ell, const TransmitPowers& powers,
                    double noise_power, int active_ports);

// log2(1 + sinr), bps/Hz
double achievable_rate(double sinr);

// convenience: materialize channels at the ports and evaluate the rate
double evaluate_rate(const ChannelSet& set, const PortSelection& ports,
                     const PhaseShiftVector& theta,
                     const TransmitPowers& powers, double noise_power);

double evaluate_sinr(const ChannelSet& set, const PortSelection& ports,
                     const PhaseShiftVector& theta,
                     const TransmitPowers& powers, double noise_power);

}  // namespace fasris

#endif
