#include <cmath>

#include "fasris/sca.hpp"

namespace fasris::sca {

double norm_lower_bound(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("norm_lower_bound: length mismatch");
    return 2.0 * std::real(b.dot(a)) - b.squaredNorm();
}

std::pair<double, double> re_im_identities(const Eigen::VectorXcd& a,
                                           const Eigen::VectorXcd& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("re_im_identities: length mismatch");
    const std::complex<double> j(0.0, 1.0);
    const double re =
        ((a + b).squaredNorm() - (a - b).squaredNorm()) / 4.0;
    const double im =
        ((a - j * b).squaredNorm() - (a + j * b).squaredNorm()) / 4.0;
    return {re, im};
}

ExpansionPoint ExpansionPoint::at(const ChannelSet& channels,
                                  const TransmitPowers& powers,
                                  const PhaseShiftVector& theta,
                                  const PortSelection& ports) {
    ExpansionPoint point;
    point.theta = theta;
    point.ports = ports;
    const Channels mats = channels.materialize(ports.r);
    const Eigen::MatrixXcd ell_bs =
        effective_channel(mats.h_bs, mats.h_d, theta, mats.g_bs);
    point.u = ell_bs * powers.p_bs;
    point.v_aux = ell_bs.adjoint() * point.u + powers.p_bs;
    return point;
}

Eigen::VectorXd LinearSignalModel::pack(const Eigen::VectorXcd& v,
                                        const Eigen::VectorXd& r) const {
    Eigen::VectorXd z(z_dim());
    z.head(n_ris) = v.real();
    z.segment(n_ris, n_ris) = v.imag();
    z.tail(n_ports) = r - r_expansion;
    return z;
}

LinearSignalModel build_linear_signal_model(const ChannelSet& channels,
                                            const TransmitPowers& powers,
                                            const ExpansionPoint& point,
                                            double trust_radius) {
    if (trust_radius <= 0.0)
        throw std::domain_error("build_linear_signal_model: trust radius must be > 0");

    LinearSignalModel model;
    model.n_ris = channels.n_ris;
    model.n_ports = point.ports.size();
    model.n_tx = channels.n_tx;
    model.trust_radius = trust_radius;
    model.r_expansion = point.ports.r;
    model.v_expansion = point.theta.unit_vector();

    const int n = model.n_ris;
    const int ml = model.n_ports;
    const int nz = model.z_dim();
    const int num_k = channels.num_interferers();
    const std::complex<double> j(0.0, 1.0);

    // per-port receive responses and their port-index derivatives
    std::vector<Eigen::VectorXcd> f_bs(ml), f_bs_d(ml), f_ris(ml), f_ris_d(ml);
    std::vector<Eigen::VectorXcd> f_int(num_k * ml), f_int_d(num_k * ml);
    for (int m = 0; m < ml; ++m) {
        const double rm = point.ports.r[m];
        const Eigen::Vector2d pos(0.0, port_coordinate(rm, channels.layout));
        f_bs[m] = field_response(pos, channels.bs_link.rx_angles,
                                 channels.layout.wavelength);
        f_bs_d[m] = field_response_port_derivative(rm, channels.bs_link.rx_angles,
                                                   channels.layout);
        if (n > 0) {
            f_ris[m] = field_response(pos, channels.ris_link.rx_angles,
                                      channels.layout.wavelength);
            f_ris_d[m] = field_response_port_derivative(
                rm, channels.ris_link.rx_angles, channels.layout);
        }
        for (int k = 0; k < num_k; ++k) {
            f_int[k * ml + m] =
                field_response(pos, channels.interferer_links[k].rx_angles,
                               channels.layout.wavelength);
            f_int_d[k * ml + m] = field_response_port_derivative(
                rm, channels.interferer_links[k].rx_angles, channels.layout);
        }
    }

    // surface rows g_m = f_ris(r_m)^H * T_ru and their derivatives
    std::vector<Eigen::RowVectorXcd> g(ml), g_d(ml);
    for (int m = 0; m < ml && n > 0; ++m) {
        g[m] = f_ris[m].adjoint() * channels.ris_link.tx_projected;
        g_d[m] = f_ris_d[m].adjoint() * channels.ris_link.tx_projected;
    }

    auto build_signal_map = [&](const LinkPathData& link,
                                const Eigen::MatrixXcd& g_surface,
                                const Eigen::VectorXcd& p,
                                const std::vector<Eigen::VectorXcd>& f,
                                const std::vector<Eigen::VectorXcd>& f_d,
                                int f_stride_base) {
        ComplexAffineMap map;
        map.base.resize(ml);
        map.jac = Eigen::MatrixXcd::Zero(ml, nz);
        const Eigen::VectorXcd c = link.tx_projected * p;  // rx_paths
        Eigen::VectorXcd w;                                // surface drive
        if (n > 0) w = g_surface * p;
        for (int m = 0; m < ml; ++m) {
            const auto& fm = f[f_stride_base + m];
            const auto& fdm = f_d[f_stride_base + m];
            // direct part only; the v columns carry the surface contribution
            map.base[m] = (fm.adjoint() * c).value();
            std::complex<double> deriv = (fdm.adjoint() * c).value();
            if (n > 0) {
                const Eigen::RowVectorXcd coeff = g[m].cwiseProduct(w.transpose());
                map.jac.block(m, 0, 1, n) = coeff;
                map.jac.block(m, n, 1, n) = j * coeff;
                deriv += (g_d[m].cwiseProduct(w.transpose()) *
                          model.v_expansion)
                             .value();
            }
            map.jac(m, 2 * n + m) = deriv;
        }
        return map;
    };

    model.signal = build_signal_map(channels.bs_link, channels.g_bs,
                                    powers.p_bs, f_bs, f_bs_d, 0);
    model.interference.reserve(num_k);
    model.interferer_rows.resize(num_k);
    for (int k = 0; k < num_k; ++k) {
        model.interference.push_back(
            build_signal_map(channels.interferer_links[k], channels.g_k[k],
                             powers.p_k[k], f_int, f_int_d, k * ml));
        auto& rows = model.interferer_rows[k];
        rows.resize(ml);
        const Eigen::MatrixXcd& t_k = channels.interferer_links[k].tx_projected;
        for (int m = 0; m < ml; ++m) {
            ComplexAffineMap a;
            a.base = t_k.adjoint() * f_int[k * ml + m];  // (f^H T)^H
            a.jac = Eigen::MatrixXcd::Zero(model.n_tx, nz);
            Eigen::VectorXcd a_deriv = t_k.adjoint() * f_int_d[k * ml + m];
            if (n > 0) {
                // P = G^H diag(conj(g_m)), column i is the weight of conj(v_i)
                const Eigen::MatrixXcd p_mat =
                    channels.g_k[k].adjoint() * g[m].conjugate().asDiagonal();
                a.jac.block(0, 0, model.n_tx, n) = p_mat;
                a.jac.block(0, n, model.n_tx, n) = -j * p_mat;
                a_deriv += channels.g_k[k].adjoint() *
                           g_d[m].conjugate().asDiagonal() *
                           model.v_expansion.conjugate();
            }
            a.jac.col(2 * n + m) = a_deriv;
            rows[m] = std::move(a);
        }
    }
    return model;
}

AffineScalar signal_power_bound(const LinearSignalModel& model,
                                const ExpansionPoint& point) {
    AffineScalar f;
    f.grad = 2.0 * (model.signal.jac.adjoint() * point.u).real();
    f.constant =
        2.0 * std::real(point.u.dot(model.signal.base)) - point.u.squaredNorm();
    return f;
}

InterferenceBounds::InterferenceBounds(const LinearSignalModel& model,
                                       const TransmitPowers& powers,
                                       int interferer)
    : model_(&model), interferer_(interferer) {
    if (interferer < 0 ||
        interferer >= static_cast<int>(model.interferer_rows.size()))
        throw std::out_of_range("InterferenceBounds: interferer index");
    const Eigen::VectorXcd& b = powers.p_k.at(interferer);
    const std::complex<double> j(0.0, 1.0);
    const Eigen::VectorXd z_point = model.pack_point();
    balance_.resize(model.n_ports);
    lin_offsets_.resize(model.n_ports);
    a_at_point_.resize(model.n_ports);
    for (int m = 0; m < model.n_ports; ++m) {
        const Eigen::VectorXcd a_n =
            model.interferer_rows[interferer][m].eval(z_point);
        // Re{a^H b} is invariant under a *= t, b /= t; balancing the two
        // norms keeps the quadratic pieces well-conditioned
        const double b_norm = std::max(b.norm(), 1e-300);
        const double a_norm = std::max(a_n.norm(), 1e-6 * b_norm);
        const double balance = std::sqrt(b_norm / a_norm);
        balance_[m] = balance;
        a_at_point_[m] = balance * a_n;
        const Eigen::VectorXcd b_scaled = b / balance;
        lin_offsets_[m][0] = -b_scaled;      // rho      >=  Re s
        lin_offsets_[m][1] = b_scaled;       // rho_bar  >= -Re s
        lin_offsets_[m][2] = j * b_scaled;   // omega    >=  Im s
        lin_offsets_[m][3] = -j * b_scaled;  // omega_bar>= -Im s
    }
}

Eigen::VectorXd InterferenceBounds::eval_variant(int variant,
                                                 const Eigen::VectorXd& z) const {
    Eigen::VectorXd out(model_->n_ports);
    for (int m = 0; m < model_->n_ports; ++m) {
        const auto& a_map = model_->interferer_rows[interferer_][m];
        const Eigen::VectorXcd a_z = balance_[m] * a_map.eval(z);
        const Eigen::VectorXcd& lo = lin_offsets_[m][variant];
        const Eigen::VectorXcd x0 = a_at_point_[m] + lo;
        out[m] = 0.25 * ((a_z - lo).squaredNorm() -
                         2.0 * std::real(x0.dot(a_z + lo)) + x0.squaredNorm());
    }
    return out;
}

InterferenceBounds::Pieces InterferenceBounds::pieces(int variant,
                                                      int port) const {
    const auto& a_map = model_->interferer_rows[interferer_][port];
    const Eigen::VectorXcd& lo = lin_offsets_[port][variant];
    const Eigen::VectorXcd x0 = a_at_point_[port] + lo;
    Pieces out;
    out.a = &a_map;
    out.a_scale = balance_[port];
    out.q_offset = -lo;
    out.lin.grad = -2.0 * balance_[port] * (a_map.jac.adjoint() * x0).real();
    out.lin.constant = -2.0 * balance_[port] * std::real(x0.dot(a_map.base)) -
                       2.0 * std::real(x0.dot(lo)) + x0.squaredNorm();
    return out;
}

}  // namespace fasris::sca
