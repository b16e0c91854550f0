#ifndef FASRIS_CHANNEL_HPP
#define FASRIS_CHANNEL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "fasris/geometry.hpp"
#include "fasris/rng.hpp"

namespace fasris {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Scenario constants. Defaults describe the reference setup: one serving
// base station with 4 antennas, a 20-port fluid antenna with 4 active ports,
// a 100-element reflecting surface and 6 co-channel interferers at 5 GHz.
struct ScenarioConfig {
    int n_tx = 4;           // antennas per base station
    int num_ports = 20;     // candidate ports M
    int active_ports = 4;   // simultaneously active ports m_l
    int n_ris = 100;        // reflecting elements N
    int n_interferers = 6;  // co-channel base stations K
    int tx_paths = 3;       // L_t
    int rx_paths = 3;       // L_r
    double rician_k = 5.0;  // LoS/NLoS power ratio on the direct links
    bool ris_links_los_only = true;
    double normalized_width = 3.0;  // fluid-antenna aperture W (wavelengths)
    double bandwidth_hz = 10e6;
    double carrier_hz = 5e9;
    double noise_psd_dbm_hz = -174.0;
    double p_max_dbm = 10.0;
    // NaN means "same as p_max_dbm"
    double interferer_power_dbm = std::numeric_limits<double>::quiet_NaN();
    double gain_1m = 1e-3;       // reference path gain at 1 m
    double exponent_los = 2.0;   // links to/from the reflecting surface
    double exponent_nlos = 2.8;  // direct ground-to-receiver links

    double bs_height_m = 10.0;
    double uav_height_m = 50.0;
    double ris_height_m = 50.0;
    double uav_dist_min_m = 50.0;
    double uav_dist_max_m = 200.0;
    double ris_uav_offset_m = 10.0;
    double interferer_ring_m = 800.0;
    double interferer_cell_m = 500.0;

    double wavelength() const { return 299792458.0 / carrier_hz; }
    double noise_power_w() const;
    double p_max_w() const;
    double interferer_power_w() const;
    PortLayout port_layout() const {
        return PortLayout(num_ports, normalized_width, wavelength());
    }
    // throws ConfigError listing every violated constraint
    void validate() const;
};

// Fixed, known transmit vectors of every base station.
struct TransmitPowers {
    Eigen::VectorXcd p_bs;                // serving station, ||p_bs||^2 <= p_max
    std::vector<Eigen::VectorXcd> p_k;    // one per interferer
    double p_max = 0.0;                   // watts
};

TransmitPowers make_transmit_powers(const ScenarioConfig& config);

// Coupling between transmit and receive path sets. Only the diagonal is
// populated: entry (0,0) carries the deterministic LoS term, the remaining
// diagonal entries are i.i.d. scattered components.
Eigen::MatrixXcd sample_path_response(int rx_paths, int tx_paths,
                                      double rician_k, double link_gain,
                                      Rng& rng);

// F^H * Psi * Lambda with shape checks.
Eigen::MatrixXcd synthesize_channel(const Eigen::MatrixXcd& rx_field,
                                    const Eigen::MatrixXcd& path_response,
                                    const Eigen::MatrixXcd& tx_field);

// One receive-side link whose rows depend on the active port positions.
// tx_projected = Psi * Lambda, so the channel at ports r is F(r)^H * tx_projected.
struct LinkPathData {
    PathAngles rx_angles;
    Eigen::MatrixXcd tx_projected;  // rx_paths x n_tx (or x n_ris)
};

// Channel matrices materialized at a fixed set of active ports.
struct Channels {
    Eigen::MatrixXcd h_bs;               // m_l x n_tx
    std::vector<Eigen::MatrixXcd> h_k;   // each m_l x n_tx
    Eigen::MatrixXcd h_d;                // n_ris x m_l (used conjugate-transposed)
    Eigen::MatrixXcd g_bs;               // n_ris x n_tx
    std::vector<Eigen::MatrixXcd> g_k;   // each n_ris x n_tx
};

// One channel realization. Raw path data for the port-dependent links is
// retained so all channel matrices are deterministic functions of the port
// selection; the surface-side links are fixed matrices.
struct ChannelSet {
    PortLayout layout;
    ScenarioGeometry geometry;
    int n_tx = 0;
    int n_ris = 0;
    LinkPathData bs_link;                    // serving station -> ports
    std::vector<LinkPathData> interferer_links;
    LinkPathData ris_link;                   // surface -> ports, tx_projected is rx_paths x n_ris
    Eigen::MatrixXcd g_bs;                   // station -> surface
    std::vector<Eigen::MatrixXcd> g_k;

    int num_interferers() const { return static_cast<int>(interferer_links.size()); }

    Eigen::MatrixXcd direct_at(const Eigen::VectorXd& ports) const;
    Eigen::MatrixXcd interferer_at(int k, const Eigen::VectorXd& ports) const;
    // m_l x n_ris map from surface elements to ports (already conjugate-transposed)
    Eigen::MatrixXcd ris_to_ports_at(const Eigen::VectorXd& ports) const;
    Channels materialize(const Eigen::VectorXd& ports) const;
};

// Draws geometry, path angles and path responses for all five link families.
ChannelSet sample_scenario(const ScenarioConfig& config, Rng& rng);

}  // namespace fasris

#endif
