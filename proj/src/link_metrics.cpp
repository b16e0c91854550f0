#include "fasris/link_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fasris {

double wrap_angle(double theta) {
    double out = std::fmod(theta, 2.0 * M_PI);
    if (out < 0.0) out += 2.0 * M_PI;
    return out;
}

Eigen::VectorXcd PhaseShiftVector::unit_vector() const {
    Eigen::VectorXcd out(theta.size());
    for (int i = 0; i < theta.size(); ++i) out[i] = std::polar(1.0, theta[i]);
    return out;
}

void PortSelection::check(int num_ports) const {
    for (int m = 0; m < size(); ++m) {
        if (r[m] < 1.0 - 1e-9 || r[m] > num_ports + 1e-9)
            throw std::domain_error("port selection outside [1, M]");
        if (integer_mode && r[m] != std::round(r[m]))
            throw std::domain_error("integer-mode port selection has fractional entry");
        if (m > 0) {
            if (!(r[m] > r[m - 1]))
                throw std::domain_error("port selection not strictly ascending");
            if (integer_mode && r[m] - r[m - 1] < 1.0)
                throw std::domain_error("integer-mode port selection has colliding ports");
        }
    }
}

PortSelection spread_ports(int active, int num_ports) {
    if (active < 1 || active > num_ports)
        throw std::domain_error("spread_ports: need 1 <= active <= num_ports");
    PortSelection out;
    out.r.resize(active);
    if (active == 1) {
        out.r[0] = (num_ports + 1) / 2.0;
    } else {
        for (int m = 0; m < active; ++m)
            out.r[m] = 1.0 + m * (num_ports - 1.0) / (active - 1.0);
    }
    return out;
}

Eigen::MatrixXcd reflection_matrix(const PhaseShiftVector& theta) {
    return theta.unit_vector().asDiagonal();
}

Eigen::MatrixXcd ris_cascade(const Eigen::MatrixXcd& h_d,
                             const Eigen::VectorXcd& v,
                             const Eigen::MatrixXcd& g) {
    if (h_d.rows() != v.size() || v.size() != g.rows())
        throw std::invalid_argument("ris_cascade: shape mismatch");
    return h_d.adjoint() * v.asDiagonal() * g;
}

Eigen::MatrixXcd effective_channel(const Eigen::MatrixXcd& h_direct,
                                   const Eigen::MatrixXcd& h_d,
                                   const PhaseShiftVector& theta,
                                   const Eigen::MatrixXcd& g) {
    if (theta.size() == 0) return h_direct;
    if (h_d.cols() != h_direct.rows() || g.cols() != h_direct.cols())
        throw std::invalid_argument("effective_channel: shape mismatch");
    return h_direct + ris_cascade(h_d, theta.unit_vector(), g);
}

EffectiveChannels build_effective_channels(const Channels& channels,
                                           const PhaseShiftVector& theta) {
    EffectiveChannels out;
    out.ell_bs = effective_channel(channels.h_bs, channels.h_d, theta, channels.g_bs);
    out.ell_k.reserve(channels.h_k.size());
    for (std::size_t k = 0; k < channels.h_k.size(); ++k)
        out.ell_k.push_back(
            effective_channel(channels.h_k[k], channels.h_d, theta, channels.g_k[k]));
    return out;
}

Eigen::VectorXcd received_signal(const EffectiveChannels& ell,
                                 const TransmitPowers& powers,
                                 const std::complex<double>& symbol_bs,
                                 const std::vector<std::complex<double>>& symbols_k,
                                 const Eigen::VectorXcd& noise) {
    Eigen::VectorXcd y = ell.ell_bs * powers.p_bs * symbol_bs;
    for (std::size_t k = 0; k < ell.ell_k.size(); ++k)
        y += ell.ell_k[k] * powers.p_k[k] * symbols_k.at(k);
    return y + noise;
}

double compute_sinr(const EffectiveChannels& ell, const TransmitPowers& powers,
                    double noise_power, int active_ports) {
    if (noise_power <= 0.0)
        throw std::domain_error("compute_sinr: noise power must be > 0");
    const double signal = (ell.ell_bs * powers.p_bs).squaredNorm();
    double denom = active_ports * noise_power;
    for (std::size_t k = 0; k < ell.ell_k.size(); ++k)
        denom += (ell.ell_k[k] * powers.p_k[k]).squaredNorm();
    return signal / denom;
}

double achievable_rate(double sinr) {
    if (sinr < 0.0) throw std::domain_error("achievable_rate: negative SINR");
    return std::log2(1.0 + sinr);
}

double evaluate_sinr(const ChannelSet& set, const PortSelection& ports,
                     const PhaseShiftVector& theta,
                     const TransmitPowers& powers, double noise_power) {
    const Channels channels = set.materialize(ports.r);
    const EffectiveChannels ell = build_effective_channels(channels, theta);
    return compute_sinr(ell, powers, noise_power, ports.size());
}

double evaluate_rate(const ChannelSet& set, const PortSelection& ports,
                     const PhaseShiftVector& theta,
                     const TransmitPowers& powers, double noise_power) {
    return achievable_rate(evaluate_sinr(set, ports, theta, powers, noise_power));
}

}  // namespace fasris
