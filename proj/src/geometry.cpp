#include "fasris/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fasris {

PortLayout::PortLayout(int m, double width, double lambda)
    : num_ports(m), normalized_width(width), wavelength(lambda) {
    if (m < 1) throw std::domain_error("port layout: num_ports must be >= 1");
    if (lambda <= 0.0) throw std::domain_error("port layout: wavelength must be > 0");
    if (width <= 0.0) throw std::domain_error("port layout: width must be > 0");
}

double port_coordinate(double port_index, const PortLayout& layout) {
    if (port_index < 1.0 || port_index > static_cast<double>(layout.num_ports))
        throw std::domain_error("port_coordinate: index outside [1, M]");
    const double offset =
        (2.0 * (port_index - 1.0) - layout.num_ports + 1.0) / 2.0;
    return offset * layout.spacing();
}

Eigen::VectorXcd field_response(const Eigen::Vector2d& position,
                                const PathAngles& angles, double wavelength) {
    if (wavelength <= 0.0)
        throw std::domain_error("field_response: wavelength must be > 0");
    const int n = angles.count();
    Eigen::VectorXcd out(n);
    const double wave_number = 2.0 * M_PI / wavelength;
    for (int p = 0; p < n; ++p) {
        const double delay = position.x() * std::sin(angles.elevation[p]) *
                                 std::cos(angles.azimuth[p]) +
                             position.y() * std::cos(angles.elevation[p]);
        out[p] = std::polar(1.0, wave_number * delay);
    }
    return out;
}

Eigen::MatrixXcd receive_field_matrix(const Eigen::VectorXd& port_indices,
                                      const PathAngles& angles,
                                      const PortLayout& layout) {
    if (port_indices.size() == 0)
        throw std::domain_error("receive_field_matrix: empty port list");
    Eigen::MatrixXcd out(angles.count(), port_indices.size());
    for (int m = 0; m < port_indices.size(); ++m) {
        const Eigen::Vector2d pos(0.0, port_coordinate(port_indices[m], layout));
        out.col(m) = field_response(pos, angles, layout.wavelength);
    }
    return out;
}

Eigen::MatrixXcd transmit_field_matrix(
    const std::vector<Eigen::Vector2d>& positions, const PathAngles& angles,
    double wavelength) {
    if (positions.empty())
        throw std::domain_error("transmit_field_matrix: empty element list");
    Eigen::MatrixXcd out(angles.count(), static_cast<int>(positions.size()));
    for (std::size_t n = 0; n < positions.size(); ++n)
        out.col(static_cast<int>(n)) =
            field_response(positions[n], angles, wavelength);
    return out;
}

Eigen::VectorXcd field_response_port_derivative(double port_index,
                                                const PathAngles& angles,
                                                const PortLayout& layout) {
    // d/dr exp(j*k*y(r)*cos(el)) with dy/dr = spacing
    const Eigen::Vector2d pos(0.0, port_coordinate(port_index, layout));
    const Eigen::VectorXcd base = field_response(pos, angles, layout.wavelength);
    const double wave_number = 2.0 * M_PI / layout.wavelength;
    Eigen::VectorXcd out(angles.count());
    for (int p = 0; p < angles.count(); ++p) {
        const double rate =
            wave_number * layout.spacing() * std::cos(angles.elevation[p]);
        out[p] = std::complex<double>(0.0, rate) * base[p];
    }
    return out;
}

double path_loss(double distance, double gain_at_1m, double exponent) {
    if (distance <= 0.0) throw std::domain_error("path_loss: distance must be > 0");
    return gain_at_1m / std::pow(distance, exponent);
}

std::vector<Eigen::Vector2d> uniform_line_array(int count, double wavelength) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(count);
    const double d = wavelength / 2.0;
    for (int n = 0; n < count; ++n) {
        const double y = (n - (count - 1) / 2.0) * d;
        out.emplace_back(0.0, y);
    }
    return out;
}

std::vector<Eigen::Vector2d> uniform_grid_array(int count, double wavelength) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(count);
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const double d = wavelength / 2.0;
    for (int n = 0; n < count; ++n) {
        const int i = n / cols;
        const int j = n % cols;
        out.emplace_back((j - (cols - 1) / 2.0) * d, (i - (rows - 1) / 2.0) * d);
    }
    return out;
}

}  // namespace fasris
