#include <algorithm>
#include <cmath>

#include "fasris/sca.hpp"

namespace fasris::sca {

conic::SolverSettings SCAParams::default_subproblem_solver() {
    conic::SolverSettings settings;
    settings.tol = 2e-4;
    // primal/dual residuals drive the step quality; the gap certificate is
    // inflated by the interference weight and only sanity-checked here
    settings.tol_gap = 2e-2;
    settings.max_iters = 2500;
    settings.check_interval = 25;
    return settings;
}

Eigen::VectorXcd SubproblemSpec::extract_v(const Eigen::VectorXd& x) const {
    Eigen::VectorXcd v(n_ris);
    for (int i = 0; i < n_ris; ++i)
        v[i] = std::complex<double>(x[v_re_at + i], x[v_im_at + i]);
    return v;
}

Eigen::VectorXd SubproblemSpec::extract_r(const Eigen::VectorXd& x) const {
    return x.segment(r_at, n_ports);
}

namespace {

struct RealRow {
    std::vector<std::pair<int, double>> terms;
    double offset = 0.0;
};

class ProgramBuilder {
  public:
    explicit ProgramBuilder(int n_vars) : n_vars_(n_vars) {}

    void add_row(const RealRow& row) {
        for (const auto& [var, coef] : row.terms)
            if (coef != 0.0) triplets_.emplace_back(next_row_, var, coef);
        b_.push_back(row.offset);
        ++next_row_;
    }

    void add_block(conic::ConeType type, const std::vector<RealRow>& rows) {
        for (const auto& row : rows) add_row(row);
        cones_.push_back({type, static_cast<int>(rows.size())});
    }

    conic::ConicProgram finish(Eigen::VectorXd c) {
        conic::ConicProgram prog;
        prog.c = std::move(c);
        prog.b = Eigen::Map<Eigen::VectorXd>(b_.data(), b_.size());
        prog.a.resize(next_row_, n_vars_);
        prog.a.setFromTriplets(triplets_.begin(), triplets_.end());
        prog.cones = std::move(cones_);
        return prog;
    }

  private:
    int n_vars_;
    int next_row_ = 0;
    std::vector<Eigen::Triplet<double>> triplets_;
    std::vector<double> b_;
    std::vector<conic::Cone> cones_;
};

}  // namespace

SubproblemSpec assemble_subproblem(const ChannelSet& channels,
                                   const TransmitPowers& powers,
                                   const ExpansionPoint& point,
                                   const SCAParams& params,
                                   bool with_restoration_slack) {
    const LinearSignalModel model = build_linear_signal_model(
        channels, powers, point, params.trust_radius);
    const int n = model.n_ris;
    const int ml = model.n_ports;
    const int num_k = channels.num_interferers();
    const int num_ports_total = channels.layout.num_ports;
    if (ml > num_ports_total)
        throw std::invalid_argument("assemble_subproblem: more active ports than ports");

    SubproblemSpec spec;
    spec.n_ris = n;
    spec.n_ports = ml;
    spec.n_interferers = num_k;
    spec.r_expansion = point.ports.r;
    spec.v_expansion = model.v_expansion;

    int at = 0;
    spec.v_re_at = at; at += n;
    spec.v_im_at = at; at += n;
    spec.r_at = at; at += ml;
    if (num_k > 0) {
        spec.rho_at = at; at += num_k;
        spec.rho_bar_at = at; at += num_k;
        spec.t_at = at; at += num_k;
    }
    if (with_restoration_slack) { spec.viol_at = at; at += 1; }
    const int n_vars = at;

    // amplitude normalization keeps the conic data well-scaled
    const double noise = params.noise_power;
    const double amp =
        std::max(point.u.norm(), std::sqrt(static_cast<double>(ml) * noise));
    spec.amplitude_scale = amp;
    const double amp_sq = amp * amp;
    const double noise_scaled = noise / amp_sq;

    // interference weight: the current SINR makes the objective a local
    // ascent direction of the rate
    const Eigen::VectorXd z_point = model.pack_point();
    double interference_power = 0.0;
    for (int k = 0; k < num_k; ++k)
        interference_power += model.interference[k].eval(z_point).squaredNorm();
    const double sinr_now =
        point.u.squaredNorm() / (interference_power + ml * noise);
    spec.interference_weight =
        std::clamp(sinr_now, 1.0, params.interference_weight_cap);

    const AffineScalar f = signal_power_bound(model, point);
    const double gamma = params.gamma_linear();

    // map a z-affine functional (scaled by `scale`) to absolute-r variables
    auto scalar_row = [&](const AffineScalar& fn, double scale) {
        RealRow row;
        row.offset = fn.constant * scale;
        for (int i = 0; i < n; ++i) {
            row.terms.emplace_back(spec.v_re_at + i, fn.grad[i] * scale);
            row.terms.emplace_back(spec.v_im_at + i, fn.grad[n + i] * scale);
        }
        for (int m = 0; m < ml; ++m) {
            const double coef = fn.grad[2 * n + m] * scale;
            row.terms.emplace_back(spec.r_at + m, coef);
            row.offset -= coef * point.ports.r[m];
        }
        return row;
    };
    auto scaled_row = [](RealRow row, double factor, double extra_offset) {
        for (auto& [var, coef] : row.terms) coef *= factor;
        row.offset = row.offset * factor + extra_offset;
        return row;
    };
    auto single_term = [](int var, double coef, double offset) {
        RealRow row;
        row.terms.emplace_back(var, coef);
        row.offset = offset;
        return row;
    };

    // the QoS budget L(z) = f(z)/gamma - ml*noise (+ violation slack)
    AffineScalar f_scaled{f.grad / amp_sq, f.constant / amp_sq};
    RealRow budget = scalar_row(f_scaled, 1.0 / gamma);
    budget.offset -= static_cast<double>(ml) * noise_scaled;
    if (with_restoration_slack) budget.terms.emplace_back(spec.viol_at, 1.0);

    ProgramBuilder builder(n_vars);

    // nonnegative rows: port box/ordering/trust region, slack positivity
    {
        std::vector<RealRow> rows;
        rows.push_back(single_term(spec.r_at, 1.0, -1.0));
        rows.push_back(single_term(spec.r_at + ml - 1, -1.0,
                                   static_cast<double>(num_ports_total)));
        for (int m = 0; m + 1 < ml; ++m) {
            RealRow gap;
            gap.terms.emplace_back(spec.r_at + m + 1, 1.0);
            gap.terms.emplace_back(spec.r_at + m, -1.0);
            gap.offset = -1.0;
            rows.push_back(gap);
        }
        if (params.optimize_ports) {
            for (int m = 0; m < ml; ++m) {
                rows.push_back(single_term(spec.r_at + m, -1.0,
                                           params.trust_radius + point.ports.r[m]));
                rows.push_back(single_term(spec.r_at + m, 1.0,
                                           params.trust_radius - point.ports.r[m]));
            }
        }
        for (int k = 0; k < num_k; ++k) {
            rows.push_back(single_term(spec.rho_at + k, 1.0, 0.0));
            rows.push_back(single_term(spec.rho_bar_at + k, 1.0, 0.0));
            rows.push_back(single_term(spec.t_at + k, 1.0, 0.0));
        }
        if (with_restoration_slack)
            rows.push_back(single_term(spec.viol_at, 1.0, 0.0));
        if (num_k == 0) rows.push_back(budget);
        builder.add_block(conic::ConeType::NonNegative, rows);
    }

    if (!params.optimize_ports) {
        std::vector<RealRow> rows;
        for (int m = 0; m < ml; ++m)
            rows.push_back(single_term(spec.r_at + m, 1.0, -point.ports.r[m]));
        builder.add_block(conic::ConeType::Zero, rows);
    }

    // |v_i| <= 1
    for (int i = 0; i < n; ++i) {
        std::vector<RealRow> rows(3);
        rows[0].offset = 1.0;
        rows[1] = single_term(spec.v_re_at + i, 1.0, 0.0);
        rows[2] = single_term(spec.v_im_at + i, 1.0, 0.0);
        builder.add_block(conic::ConeType::SecondOrder, rows);
    }

    // signal budget covers noise plus squared interference slacks
    if (num_k > 0) {
        std::vector<RealRow> rows;
        rows.push_back(scaled_row(budget, 0.5, 0.5));
        for (int k = 0; k < num_k; ++k)
            rows.push_back(single_term(spec.rho_at + k, 1.0, 0.0));
        for (int k = 0; k < num_k; ++k)
            rows.push_back(single_term(spec.rho_bar_at + k, 1.0, 0.0));
        rows.push_back(scaled_row(budget, 0.5, -0.5));
        builder.add_block(conic::ConeType::SecondOrder, rows);
    }

    // four convex bounds per interferer and port; the Re pair constrains
    // rho_k, the Im pair constrains rho_bar_k
    const double amp_sqrt = std::sqrt(amp);
    for (int k = 0; k < num_k; ++k) {
        const InterferenceBounds bounds(model, powers, k);
        for (int variant = 0; variant < 4; ++variant) {
            const int slack_var =
                variant < 2 ? spec.rho_at + k : spec.rho_bar_at + k;
            for (int m = 0; m < ml; ++m) {
                const auto pieces = bounds.pieces(variant, m);
                // ||q(z)||^2/amp <= 4*rho - lin(z)/amp
                RealRow lin = scalar_row(pieces.lin, -1.0 / amp);
                lin.terms.emplace_back(slack_var, 4.0);
                std::vector<RealRow> rows;
                rows.push_back(scaled_row(lin, 0.5, 0.5));
                const auto& a_map = *pieces.a;
                const double jac_scale = pieces.a_scale / amp_sqrt;
                for (int row_part = 0; row_part < 2; ++row_part) {
                    for (int i = 0; i < model.n_tx; ++i) {
                        RealRow qr;
                        const std::complex<double> base_i =
                            (pieces.a_scale * a_map.base[i] + pieces.q_offset[i]) /
                            amp_sqrt;
                        qr.offset = row_part == 0 ? base_i.real() : base_i.imag();
                        for (int col = 0; col < n; ++col) {
                            const std::complex<double> re_c =
                                a_map.jac(i, col) * jac_scale;
                            const std::complex<double> im_c =
                                a_map.jac(i, n + col) * jac_scale;
                            qr.terms.emplace_back(
                                spec.v_re_at + col,
                                row_part == 0 ? re_c.real() : re_c.imag());
                            qr.terms.emplace_back(
                                spec.v_im_at + col,
                                row_part == 0 ? im_c.real() : im_c.imag());
                        }
                        const std::complex<double> dr_c =
                            a_map.jac(i, 2 * n + m) * jac_scale;
                        const double coef = row_part == 0 ? dr_c.real() : dr_c.imag();
                        qr.terms.emplace_back(spec.r_at + m, coef);
                        qr.offset -= coef * point.ports.r[m];
                        rows.push_back(std::move(qr));
                    }
                }
                rows.push_back(scaled_row(lin, 0.5, -0.5));
                builder.add_block(conic::ConeType::SecondOrder, rows);
            }
        }
    }

    // the slacks also cap the Euclidean norms of Re/Im of each effective
    // interference signal, which the exact-in-v model exposes as affine rows;
    // this dominates the componentwise bounds and makes the slack sum the
    // full interference power
    for (int k = 0; k < num_k; ++k) {
        const auto& s_map = model.interference[k];
        for (int part = 0; part < 2; ++part) {
            std::vector<RealRow> rows;
            rows.push_back(single_term(
                part == 0 ? spec.rho_at + k : spec.rho_bar_at + k, 1.0, 0.0));
            for (int m = 0; m < ml; ++m) {
                RealRow sr;
                const std::complex<double> base_m = s_map.base[m] / amp;
                sr.offset = part == 0 ? base_m.real() : base_m.imag();
                for (int col = 0; col < n; ++col) {
                    const std::complex<double> re_c = s_map.jac(m, col) / amp;
                    const std::complex<double> im_c = s_map.jac(m, n + col) / amp;
                    sr.terms.emplace_back(spec.v_re_at + col,
                                          part == 0 ? re_c.real() : re_c.imag());
                    sr.terms.emplace_back(spec.v_im_at + col,
                                          part == 0 ? im_c.real() : im_c.imag());
                }
                const std::complex<double> dr_c = s_map.jac(m, 2 * n + m) / amp;
                const double coef = part == 0 ? dr_c.real() : dr_c.imag();
                sr.terms.emplace_back(spec.r_at + m, coef);
                sr.offset -= coef * point.ports.r[m];
                rows.push_back(std::move(sr));
            }
            builder.add_block(conic::ConeType::SecondOrder, rows);
        }
    }

    // t_k >= rho_k^2 + rho_bar_k^2 epigraphs feeding the objective
    for (int k = 0; k < num_k; ++k) {
        std::vector<RealRow> rows;
        rows.push_back(single_term(spec.t_at + k, 0.5, 0.5));
        rows.push_back(single_term(spec.rho_at + k, 1.0, 0.0));
        rows.push_back(single_term(spec.rho_bar_at + k, 1.0, 0.0));
        rows.push_back(single_term(spec.t_at + k, 0.5, -0.5));
        builder.add_block(conic::ConeType::SecondOrder, rows);
    }

    // minimize -(signal bound) - delta*(linearized unit-circle push)
    // + weight*(interference power) [+ penalty*violation]
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_vars);
    for (int i = 0; i < n; ++i) {
        c[spec.v_re_at + i] = -(f_scaled.grad[i] +
                                2.0 * params.regularization *
                                    model.v_expansion[i].real());
        c[spec.v_im_at + i] = -(f_scaled.grad[n + i] +
                                2.0 * params.regularization *
                                    model.v_expansion[i].imag());
    }
    if (params.optimize_ports)
        for (int m = 0; m < ml; ++m) c[spec.r_at + m] = -f_scaled.grad[2 * n + m];
    for (int k = 0; k < num_k; ++k)
        c[spec.t_at + k] = spec.interference_weight;
    if (with_restoration_slack) c[spec.viol_at] = 100.0 * (1.0 + spec.interference_weight);

    spec.program = builder.finish(std::move(c));
    spec.program.validate();
    return spec;
}

namespace {

// nondecreasing least-squares fit (pool adjacent violators), then clipping
Eigen::VectorXd isotonic_clipped(const Eigen::VectorXd& y, double lo, double hi) {
    const int n = static_cast<int>(y.size());
    std::vector<double> value(n), weight(n);
    std::vector<int> size(n);
    int blocks = 0;
    for (int i = 0; i < n; ++i) {
        value[blocks] = y[i];
        weight[blocks] = 1.0;
        size[blocks] = 1;
        ++blocks;
        while (blocks > 1 && value[blocks - 2] > value[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            value[blocks - 2] =
                (value[blocks - 2] * weight[blocks - 2] +
                 value[blocks - 1] * weight[blocks - 1]) / w;
            weight[blocks - 2] = w;
            size[blocks - 2] += size[blocks - 1];
            --blocks;
        }
    }
    Eigen::VectorXd out(n);
    int at = 0;
    for (int blk = 0; blk < blocks; ++blk)
        for (int i = 0; i < size[blk]; ++i)
            out[at++] = std::clamp(value[blk], lo, hi);
    return out;
}

}  // namespace

std::pair<PhaseShiftVector, PortSelection> project_solution(
    const Eigen::VectorXcd& raw_v, const Eigen::VectorXd& raw_r, int num_ports,
    bool integer_mode) {
    const int ml = static_cast<int>(raw_r.size());
    if (ml > num_ports)
        throw InfeasibleError("project_solution: more active ports than ports");

    PhaseShiftVector theta;
    theta.theta.resize(raw_v.size());
    for (int i = 0; i < raw_v.size(); ++i)
        theta.theta[i] =
            raw_v[i] == std::complex<double>(0.0, 0.0)
                ? 0.0
                : wrap_angle(std::arg(raw_v[i]));

    PortSelection ports;
    ports.integer_mode = integer_mode;
    ports.r.resize(ml);
    if (integer_mode) {
        std::vector<long> r_int(ml);
        for (int m = 0; m < ml; ++m) {
            long candidate = std::lround(raw_r[m]);
            if (m > 0) candidate = std::max(candidate, r_int[m - 1] + 1);
            r_int[m] = std::max<long>(candidate, 1 + m);
        }
        if (r_int[ml - 1] > num_ports) {
            r_int[ml - 1] = num_ports;
            for (int m = ml - 2; m >= 0; --m)
                r_int[m] = std::min(r_int[m], r_int[m + 1] - 1);
        }
        for (int m = 0; m < ml; ++m) ports.r[m] = static_cast<double>(r_int[m]);
    } else {
        // shift so unit gaps become plain monotonicity, project, shift back
        Eigen::VectorXd shifted(ml);
        for (int m = 0; m < ml; ++m) shifted[m] = raw_r[m] - m;
        const Eigen::VectorXd fitted =
            isotonic_clipped(shifted, 1.0, static_cast<double>(num_ports - ml + 1));
        for (int m = 0; m < ml; ++m) ports.r[m] = fitted[m] + m;
    }
    ports.check(num_ports);
    return {theta, ports};
}

}  // namespace fasris::sca
