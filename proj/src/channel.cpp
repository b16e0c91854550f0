#include "fasris/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fasris {

double ScenarioConfig::noise_power_w() const {
    const double dbm = noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double ScenarioConfig::p_max_w() const {
    return std::pow(10.0, (p_max_dbm - 30.0) / 10.0);
}

double ScenarioConfig::interferer_power_w() const {
    const double dbm =
        std::isnan(interferer_power_dbm) ? p_max_dbm : interferer_power_dbm;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

void ScenarioConfig::validate() const {
    std::vector<std::string> problems;
    if (n_tx < 1) problems.push_back("n_tx must be >= 1");
    if (num_ports < 1) problems.push_back("num_ports must be >= 1");
    if (active_ports < 1) problems.push_back("active_ports must be >= 1");
    if (active_ports > num_ports)
        problems.push_back("active_ports (" + std::to_string(active_ports) +
                           ") exceeds num_ports (" + std::to_string(num_ports) + ")");
    if (n_ris < 0) problems.push_back("n_ris must be >= 0");
    if (n_interferers < 0) problems.push_back("n_interferers must be >= 0");
    if (tx_paths < 1) problems.push_back("tx_paths must be >= 1");
    if (rx_paths < 1) problems.push_back("rx_paths must be >= 1");
    if (rician_k < 0.0) problems.push_back("rician_k must be >= 0");
    if (normalized_width <= 0.0) problems.push_back("normalized_width must be > 0");
    if (bandwidth_hz <= 0.0) problems.push_back("bandwidth_hz must be > 0");
    if (carrier_hz <= 0.0) problems.push_back("carrier_hz must be > 0");
    if (gain_1m <= 0.0) problems.push_back("gain_1m must be > 0");
    if (uav_dist_min_m <= 0.0 || uav_dist_max_m < uav_dist_min_m)
        problems.push_back("uav distance range must satisfy 0 < min <= max");
    if (uav_dist_min_m <= std::abs(uav_height_m - bs_height_m) &&
        uav_dist_max_m <= std::abs(uav_height_m - bs_height_m))
        problems.push_back("uav distance range is below the height difference");
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ConfigError(msg.str());
    }
}

TransmitPowers make_transmit_powers(const ScenarioConfig& config) {
    TransmitPowers out;
    out.p_max = config.p_max_w();
    const double amp = std::sqrt(out.p_max / config.n_tx);
    out.p_bs = Eigen::VectorXcd::Constant(config.n_tx, amp);
    const double amp_k = std::sqrt(config.interferer_power_w() / config.n_tx);
    out.p_k.assign(config.n_interferers,
                   Eigen::VectorXcd::Constant(config.n_tx, amp_k));
    return out;
}

Eigen::MatrixXcd sample_path_response(int rx_paths, int tx_paths,
                                      double rician_k, double link_gain,
                                      Rng& rng) {
    if (rx_paths < 1 || tx_paths < 1)
        throw std::domain_error("sample_path_response: path counts must be >= 1");
    if (link_gain <= 0.0)
        throw std::domain_error("sample_path_response: link gain must be > 0");
    if (rician_k < 0.0)
        throw std::domain_error("sample_path_response: rician factor must be >= 0");

    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(rx_paths, tx_paths);
    const int diag = std::min(rx_paths, tx_paths);
    if (std::isinf(rician_k)) {
        psi(0, 0) = std::sqrt(link_gain);
        return psi;
    }
    psi(0, 0) = std::sqrt(link_gain) * std::sqrt(rician_k / (rician_k + 1.0));
    if (diag > 1) {
        const double var = link_gain / ((rician_k + 1.0) * (diag - 1));
        for (int i = 1; i < diag; ++i) psi(i, i) = rng.complex_normal(var);
    }
    return psi;
}

Eigen::MatrixXcd synthesize_channel(const Eigen::MatrixXcd& rx_field,
                                    const Eigen::MatrixXcd& path_response,
                                    const Eigen::MatrixXcd& tx_field) {
    if (rx_field.rows() != path_response.rows() ||
        path_response.cols() != tx_field.rows())
        throw std::invalid_argument("synthesize_channel: shape mismatch");
    return rx_field.adjoint() * path_response * tx_field;
}

Eigen::MatrixXcd ChannelSet::direct_at(const Eigen::VectorXd& ports) const {
    return receive_field_matrix(ports, bs_link.rx_angles, layout).adjoint() *
           bs_link.tx_projected;
}

Eigen::MatrixXcd ChannelSet::interferer_at(int k,
                                           const Eigen::VectorXd& ports) const {
    const auto& link = interferer_links.at(k);
    return receive_field_matrix(ports, link.rx_angles, layout).adjoint() *
           link.tx_projected;
}

Eigen::MatrixXcd ChannelSet::ris_to_ports_at(const Eigen::VectorXd& ports) const {
    return receive_field_matrix(ports, ris_link.rx_angles, layout).adjoint() *
           ris_link.tx_projected;
}

Channels ChannelSet::materialize(const Eigen::VectorXd& ports) const {
    Channels out;
    out.h_bs = direct_at(ports);
    out.h_k.reserve(interferer_links.size());
    for (int k = 0; k < num_interferers(); ++k)
        out.h_k.push_back(interferer_at(k, ports));
    out.h_d = ris_to_ports_at(ports).adjoint();
    out.g_bs = g_bs;
    out.g_k = g_k;
    return out;
}

namespace {

// elevation measured from the array axis (global y), azimuth in the x-z plane
PathAngles los_plus_scatter(const Vec3& direction, int paths, Rng& rng) {
    PathAngles out;
    out.elevation.resize(paths);
    out.azimuth.resize(paths);
    const double dy = std::clamp(direction.y(), -1.0, 1.0);
    out.elevation[0] = std::acos(dy);
    const double sin_el = std::sqrt(std::max(0.0, 1.0 - dy * dy));
    out.azimuth[0] =
        sin_el > 1e-12 ? std::atan2(direction.z(), direction.x()) : 0.0;
    if (out.azimuth[0] < 0.0) out.azimuth[0] += 2.0 * M_PI;
    for (int p = 1; p < paths; ++p) {
        out.elevation[p] = rng.uniform(0.0, M_PI);
        out.azimuth[p] = rng.uniform(0.0, 2.0 * M_PI);
    }
    return out;
}

Vec3 unit_towards(const Vec3& from, const Vec3& to) {
    return (to - from).normalized();
}

}  // namespace

ChannelSet sample_scenario(const ScenarioConfig& config, Rng& rng) {
    config.validate();

    const double lambda = config.wavelength();
    ChannelSet set;
    set.layout = config.port_layout();
    set.n_tx = config.n_tx;
    set.n_ris = config.n_ris;

    // geometry: serving station at the origin (ground height), receiver at a
    // random range, surface carrier offset next to the receiver, interferers
    // scattered in a ring of cells
    ScenarioGeometry geo;
    geo.bs_uav_pos = Vec3(0.0, 0.0, config.bs_height_m);
    const double dist = rng.uniform(config.uav_dist_min_m, config.uav_dist_max_m);
    const double dh = config.uav_height_m - config.bs_height_m;
    const double ground = std::sqrt(std::max(1.0, dist * dist - dh * dh));
    geo.uav_pos = Vec3(ground, 0.0, config.uav_height_m);
    geo.uav_ris_pos =
        Vec3(ground - config.ris_uav_offset_m, 0.0, config.ris_height_m);
    for (int k = 0; k < config.n_interferers; ++k) {
        const double cell_angle = 2.0 * M_PI * k / std::max(1, config.n_interferers);
        const Vec3 center(config.interferer_ring_m * std::cos(cell_angle),
                          config.interferer_ring_m * std::sin(cell_angle),
                          config.bs_height_m);
        // uniform draw in the cell disc
        const double radius = config.interferer_cell_m * std::sqrt(rng.uniform());
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        geo.interferer_pos.push_back(
            center + Vec3(radius * std::cos(angle), radius * std::sin(angle), 0.0));
    }
    set.geometry = geo;

    const auto bs_array = uniform_line_array(config.n_tx, lambda);
    const auto ris_array = uniform_grid_array(std::max(1, config.n_ris), lambda);
    const double inf = std::numeric_limits<double>::infinity();
    const double ris_rician = config.ris_links_los_only ? inf : config.rician_k;

    // serving station -> ports
    {
        const double gain =
            path_loss(geo.dist_bs_uav(), config.gain_1m, config.exponent_nlos);
        LinkPathData link;
        link.rx_angles = los_plus_scatter(unit_towards(geo.uav_pos, geo.bs_uav_pos),
                                          config.rx_paths, rng);
        const PathAngles tx_angles = los_plus_scatter(
            unit_towards(geo.bs_uav_pos, geo.uav_pos), config.tx_paths, rng);
        const Eigen::MatrixXcd psi = sample_path_response(
            config.rx_paths, config.tx_paths, config.rician_k, gain, rng);
        link.tx_projected = psi * transmit_field_matrix(bs_array, tx_angles, lambda);
        set.bs_link = std::move(link);
    }

    // interferers -> ports
    for (int k = 0; k < config.n_interferers; ++k) {
        const double gain = path_loss(geo.dist_interferer_uav(k), config.gain_1m,
                                      config.exponent_nlos);
        LinkPathData link;
        link.rx_angles = los_plus_scatter(
            unit_towards(geo.uav_pos, geo.interferer_pos[k]), config.rx_paths, rng);
        const PathAngles tx_angles = los_plus_scatter(
            unit_towards(geo.interferer_pos[k], geo.uav_pos), config.tx_paths, rng);
        const Eigen::MatrixXcd psi = sample_path_response(
            config.rx_paths, config.tx_paths, config.rician_k, gain, rng);
        link.tx_projected = psi * transmit_field_matrix(bs_array, tx_angles, lambda);
        set.interferer_links.push_back(std::move(link));
    }

    // surface -> ports
    {
        const double gain =
            path_loss(geo.dist_ris_uav(), config.gain_1m, config.exponent_los);
        LinkPathData link;
        link.rx_angles = los_plus_scatter(unit_towards(geo.uav_pos, geo.uav_ris_pos),
                                          config.rx_paths, rng);
        const PathAngles tx_angles = los_plus_scatter(
            unit_towards(geo.uav_ris_pos, geo.uav_pos), config.tx_paths, rng);
        const Eigen::MatrixXcd psi = sample_path_response(
            config.rx_paths, config.tx_paths, ris_rician, gain, rng);
        Eigen::MatrixXcd tx_field =
            transmit_field_matrix(ris_array, tx_angles, lambda);
        if (config.n_ris == 0) tx_field.resize(config.tx_paths, 0);
        link.tx_projected = psi * tx_field;
        set.ris_link = std::move(link);
    }

    // station -> surface and interferers -> surface (fixed receive side)
    auto make_surface_link = [&](const Vec3& tx_pos, double gain) {
        const PathAngles rx_angles = los_plus_scatter(
            unit_towards(geo.uav_ris_pos, tx_pos), config.rx_paths, rng);
        const PathAngles tx_angles = los_plus_scatter(
            unit_towards(tx_pos, geo.uav_ris_pos), config.tx_paths, rng);
        const Eigen::MatrixXcd psi = sample_path_response(
            config.rx_paths, config.tx_paths, ris_rician, gain, rng);
        Eigen::MatrixXcd rx_field =
            transmit_field_matrix(ris_array, rx_angles, lambda);
        if (config.n_ris == 0) rx_field.resize(config.rx_paths, 0);
        return (rx_field.adjoint() * psi *
                transmit_field_matrix(bs_array, tx_angles, lambda))
            .eval();
    };
    set.g_bs = make_surface_link(
        geo.bs_uav_pos,
        path_loss(geo.dist_bs_ris(), config.gain_1m, config.exponent_los));
    for (int k = 0; k < config.n_interferers; ++k)
        set.g_k.push_back(make_surface_link(
            geo.interferer_pos[k],
            path_loss(geo.dist_interferer_ris(k), config.gain_1m,
                      config.exponent_los)));

    return set;
}

}  // namespace fasris
