#ifndef FASRIS_GEOMETRY_HPP
#define FASRIS_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace fasris {

using Vec3 = Eigen::Vector3d;

// Linear array of M candidate ports spread over a total length of
// normalized_width * wavelength along the local y-axis.
struct PortLayout {
    int num_ports = 1;
    double normalized_width = 1.0;  // aperture in wavelengths
    double wavelength = 1.0;        // meters

    PortLayout() = default;
    PortLayout(int m, double width, double lambda);

    // inter-port spacing; zero for a single port
    double spacing() const {
        return num_ports > 1
                   ? normalized_width * wavelength / (num_ports - 1)
                   : 0.0;
    }
};

// Per-path arrival (or departure) directions. elevation is measured from the
// array axis, so only its cosine enters the axial phase term.
struct PathAngles {
    Eigen::VectorXd elevation;  // radians, [0, pi]
    Eigen::VectorXd azimuth;    // radians, [0, 2*pi)

    int count() const { return static_cast<int>(elevation.size()); }
};

// Node positions for one scenario snapshot.
struct ScenarioGeometry {
    Vec3 bs_uav_pos;                  // serving base station
    std::vector<Vec3> interferer_pos; // co-channel base stations
    Vec3 uav_ris_pos;                 // reflecting-surface carrier
    Vec3 uav_pos;                     // target receiver

    int num_interferers() const { return static_cast<int>(interferer_pos.size()); }
    double dist_bs_uav() const { return (bs_uav_pos - uav_pos).norm(); }
    double dist_bs_ris() const { return (bs_uav_pos - uav_ris_pos).norm(); }
    double dist_ris_uav() const { return (uav_ris_pos - uav_pos).norm(); }
    double dist_interferer_uav(int k) const { return (interferer_pos.at(k) - uav_pos).norm(); }
    double dist_interferer_ris(int k) const { return (interferer_pos.at(k) - uav_ris_pos).norm(); }
};

// y-coordinate (meters) of a possibly fractional port index. Index 1 and M
// sit symmetrically around the aperture center.
double port_coordinate(double port_index, const PortLayout& layout);

// Unit-modulus response of one receive point at (x, y) meters, one entry per
// path: exp(j*2*pi/lambda * (x*sin(el)*cos(az) + y*cos(el))).
Eigen::VectorXcd field_response(const Eigen::Vector2d& position,
                                const PathAngles& angles, double wavelength);

// Columns are field responses of the given port indices (ports sit on the
// y-axis of the local frame).
Eigen::MatrixXcd receive_field_matrix(const Eigen::VectorXd& port_indices,
                                      const PathAngles& angles,
                                      const PortLayout& layout);

// Columns are field responses of explicit (x, y) element positions.
Eigen::MatrixXcd transmit_field_matrix(
    const std::vector<Eigen::Vector2d>& positions, const PathAngles& angles,
    double wavelength);

// Derivative of the receive field response with respect to the port index.
Eigen::VectorXcd field_response_port_derivative(double port_index,
                                                const PathAngles& angles,
                                                const PortLayout& layout);

// Distance-power law: gain_at_1m / distance^exponent (linear scale).
double path_loss(double distance, double gain_at_1m, double exponent);

// Centered half-wavelength line array along the y-axis.
std::vector<Eigen::Vector2d> uniform_line_array(int count, double wavelength);

// Centered half-wavelength grid (ceil(sqrt(n)) columns) in the x-y plane.
std::vector<Eigen::Vector2d> uniform_grid_array(int count, double wavelength);

}  // namespace fasris

#endif
