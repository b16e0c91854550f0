#include "fasris/conic.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fasris::conic {

void ConicProgram::validate() const {
    if (cones.empty()) throw std::invalid_argument("conic program: no cones");
    int total = 0;
    for (const auto& cone : cones) {
        if (cone.dim < 1)
            throw std::invalid_argument("conic program: cone with dim < 1");
        total += cone.dim;
    }
    if (total != num_rows() || a.rows() != num_rows() || a.cols() != num_vars())
        throw std::invalid_argument("conic program: inconsistent dimensions");
    if (!b.allFinite() || !c.allFinite())
        throw std::invalid_argument("conic program: non-finite data");
    for (int j = 0; j < a.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it)
            if (!std::isfinite(it.value()))
                throw std::invalid_argument("conic program: non-finite matrix entry");
}

std::pair<double, Eigen::VectorXd> soc_project(double t,
                                               const Eigen::VectorXd& x) {
    const double nx = x.norm();
    if (nx <= t) return {t, x};
    if (nx <= -t) return {0.0, Eigen::VectorXd::Zero(x.size())};
    const double scale = (t + nx) / 2.0;
    return {scale, (scale / nx) * x};
}

namespace {

template <typename Fn>
void for_each_block(const std::vector<Cone>& cones, Fn&& fn) {
    int offset = 0;
    for (const auto& cone : cones) {
        fn(cone, offset);
        offset += cone.dim;
    }
}

}  // namespace

Eigen::VectorXd project_cones(const Eigen::VectorXd& v,
                              const std::vector<Cone>& cones) {
    Eigen::VectorXd out(v.size());
    for_each_block(cones, [&](const Cone& cone, int at) {
        switch (cone.type) {
            case ConeType::Zero:
                out.segment(at, cone.dim).setZero();
                break;
            case ConeType::NonNegative:
                out.segment(at, cone.dim) =
                    v.segment(at, cone.dim).cwiseMax(0.0);
                break;
            case ConeType::SecondOrder: {
                auto [t, x] = soc_project(v[at], v.segment(at + 1, cone.dim - 1));
                out[at] = t;
                out.segment(at + 1, cone.dim - 1) = x;
                break;
            }
        }
    });
    return out;
}

Eigen::VectorXd project_dual_cones(const Eigen::VectorXd& v,
                                   const std::vector<Cone>& cones) {
    Eigen::VectorXd out(v.size());
    for_each_block(cones, [&](const Cone& cone, int at) {
        switch (cone.type) {
            case ConeType::Zero:  // dual of {0} is the whole space
                out.segment(at, cone.dim) = v.segment(at, cone.dim);
                break;
            case ConeType::NonNegative:
                out.segment(at, cone.dim) =
                    v.segment(at, cone.dim).cwiseMax(0.0);
                break;
            case ConeType::SecondOrder: {  // self-dual
                auto [t, x] = soc_project(v[at], v.segment(at + 1, cone.dim - 1));
                out[at] = t;
                out.segment(at + 1, cone.dim - 1) = x;
                break;
            }
        }
    });
    return out;
}

double cone_distance(const Eigen::VectorXd& v, const std::vector<Cone>& cones) {
    return (v - project_cones(v, cones)).norm();
}

namespace {

// Ruiz equilibration of the stacked [A; c'] system. Rows inside one
// second-order block share a scaling so the cone geometry is preserved;
// including the objective row balances disparate cost coefficients.
struct Scaling {
    Eigen::VectorXd row;   // D
    Eigen::VectorXd col;   // E
    double cost = 1.0;     // kappa applied to c
};

Scaling equilibrate(Eigen::SparseMatrix<double>& a, Eigen::VectorXd& c,
                    const std::vector<Cone>& cones, int sweeps) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Scaling sc;
    sc.row = Eigen::VectorXd::Ones(m);
    sc.col = Eigen::VectorXd::Ones(n);

    Eigen::VectorXd row_max(m), col_max(n);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        row_max.setZero();
        col_max.setZero();
        for (int j = 0; j < a.outerSize(); ++j)
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it) {
                const double v = std::abs(it.value());
                row_max[it.row()] = std::max(row_max[it.row()], v);
                col_max[j] = std::max(col_max[j], v);
            }
        for (int j = 0; j < n; ++j)
            col_max[j] = std::max(col_max[j], std::abs(c[j]));
        // uniform scaling within each second-order block
        for_each_block(cones, [&](const Cone& cone, int at) {
            if (cone.type != ConeType::SecondOrder) return;
            const double blk = row_max.segment(at, cone.dim).maxCoeff();
            row_max.segment(at, cone.dim).setConstant(blk);
        });
        Eigen::VectorXd dr(m), dc(n);
        for (int i = 0; i < m; ++i)
            dr[i] = row_max[i] > 1e-12 ? 1.0 / std::sqrt(row_max[i]) : 1.0;
        for (int j = 0; j < n; ++j)
            dc[j] = col_max[j] > 1e-12 ? 1.0 / std::sqrt(col_max[j]) : 1.0;
        for (int j = 0; j < a.outerSize(); ++j)
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it)
                it.valueRef() *= dr[it.row()] * dc[j];
        c.array() *= dc.array();
        sc.row.array() *= dr.array();
        sc.col.array() *= dc.array();
    }
    return sc;
}

}  // namespace

SolverSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
    prog.validate();
    const int n = prog.num_vars();
    const int m = prog.num_rows();

    // scaled copy: ahat = D*A*E, bhat = D*b, chat = kappa*E*c
    Eigen::SparseMatrix<double> ahat = prog.a;
    Eigen::VectorXd chat = prog.c;
    Scaling sc =
        equilibrate(ahat, chat, prog.cones, settings.equilibration_sweeps);
    Eigen::VectorXd bhat = sc.row.asDiagonal() * prog.b;
    const double cnorm = chat.lpNorm<Eigen::Infinity>();
    sc.cost = cnorm > 1e-12 ? 1.0 / cnorm : 1.0;
    chat *= sc.cost;

    // x-update system matrix rho*A'A + sigma*I (dense at this scale);
    // a materialized transpose keeps both products in saxpy form
    const Eigen::SparseMatrix<double> ahat_t = ahat.transpose();
    Eigen::MatrixXd ata = Eigen::MatrixXd(ahat_t * ahat);
    double rho = settings.rho;
    const double sigma = settings.sigma;
    Eigen::LLT<Eigen::MatrixXd> llt;
    auto refactor = [&]() {
        Eigen::MatrixXd system = rho * ata;
        system.diagonal().array() += sigma;
        llt.compute(system);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("conic solve: factorization failed");
    };
    refactor();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    if (settings.warm_x.size() == n && settings.warm_s.size() == m &&
        settings.warm_y.size() == m) {
        x = sc.col.cwiseInverse().asDiagonal() * settings.warm_x;
        s = sc.row.asDiagonal() * settings.warm_s;
        // y = -rho * D * u / kappa  =>  u = -kappa * D^-1 * y / rho
        u = (-sc.cost / rho) * (settings.warm_y.cwiseQuotient(sc.row));
    }

    SolverSolution sol;
    auto unscale = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& ss,
                       const Eigen::VectorXd& us) {
        sol.x = sc.col.asDiagonal() * xs;
        sol.s = ss.cwiseQuotient(sc.row);
        sol.y = (-rho / sc.cost) * (sc.row.asDiagonal() * us);
    };

    const double alpha = settings.over_relaxation;
    Eigen::VectorXd ax(m), rhs(n), w(m), resid(m);
    Residuals best_res;
    best_res.primal = best_res.dual = best_res.gap =
        std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x, best_s = s, best_u = u;
    double u_norm_start = -1.0;
    int iter = 0;
    int last_rho_change = 0;
    SolveStatus status = SolveStatus::MaxIters;

    for (iter = 1; iter <= settings.max_iters; ++iter) {
        resid = s - u - bhat;
        rhs.noalias() = ahat_t * resid;
        rhs *= rho;
        rhs -= chat;
        rhs += sigma * x;
        x = llt.solve(rhs);
        ax.noalias() = ahat * x;
        w = alpha * (ax + bhat) + (1.0 - alpha) * s + u;
        s = project_cones(w, prog.cones);
        u = w - s;

        if (iter % settings.check_interval != 0 && iter != settings.max_iters)
            continue;

        unscale(x, s, u);
        const double obj = prog.c.dot(sol.x);
        const double dual_obj = -prog.b.dot(sol.y);
        Eigen::VectorXd slack = prog.a * sol.x + prog.b;
        Residuals res;
        res.primal = (slack - sol.s).norm() /
                     (1.0 + std::max(slack.norm(), sol.s.norm()));
        res.dual = (prog.c - prog.a.transpose() * sol.y).norm() /
                   (1.0 + prog.c.norm());
        res.gap = std::abs(obj - dual_obj) /
                  (1.0 + std::abs(obj) + std::abs(dual_obj));
        if (settings.verbose)
            std::fprintf(stderr,
                         "  admm %6d: pri %.2e dual %.2e gap %.2e rho %.2e\n",
                         iter, res.primal, res.dual, res.gap, rho);
        if (res.max() < best_res.max()) {
            best_res = res;
            best_x = x;
            best_s = s;
            best_u = u;
        }
        const double gap_tol =
            settings.tol_gap > 0.0 ? settings.tol_gap : settings.tol;
        if (res.primal <= settings.tol && res.dual <= settings.tol &&
            res.gap <= gap_tol) {
            status = SolveStatus::Optimal;
            break;
        }

        // infeasibility certificate: y in K*, A'y ~ 0, b'y < 0
        const double u_norm = u.norm();
        if (u_norm_start < 0.0) u_norm_start = u_norm + 1.0;
        if (u_norm > 1e4 * u_norm_start && res.primal > 1e3 * settings.tol) {
            Eigen::VectorXd yc = sol.y / std::max(sol.y.norm(), 1e-300);
            const double aty = (prog.a.transpose() * yc).norm();
            const double bty = prog.b.dot(yc);
            if (aty < 1e-6 && bty < -1e-8) {
                status = SolveStatus::Infeasible;
                break;
            }
        }

        if (settings.adaptive_rho && iter < settings.max_iters * 9 / 10 &&
            iter - last_rho_change >= 4 * settings.check_interval) {
            double factor = 1.0;
            if (res.primal > 25.0 * res.dual)
                factor = 2.0;
            else if (res.dual > 25.0 * res.primal)
                factor = 0.5;
            if (factor != 1.0 && rho * factor >= 1e-4 && rho * factor <= 1e4) {
                rho *= factor;
                u /= factor;
                best_u /= factor;  // keep -rho*u continuous
                refactor();
                last_rho_change = iter;
            }
        }
    }

    if (status != SolveStatus::Infeasible) {
        unscale(best_x, best_s, best_u);
        sol.residuals = best_res;
    } else {
        sol.residuals = best_res;
    }
    sol.status = status;
    sol.iterations = std::min(iter, settings.max_iters);
    sol.objective = prog.c.dot(sol.x);
    sol.dual_objective = -prog.b.dot(sol.y);
    return sol;
}

ResidualReport verify_solution(const ConicProgram& prog,
                               const SolverSolution& sol) {
    ResidualReport report;
    const Eigen::VectorXd slack = prog.a * sol.x + prog.b;
    report.primal_cone_dist = cone_distance(slack, prog.cones);
    report.dual_eq = (prog.c - prog.a.transpose() * sol.y).norm();
    report.dual_cone_dist =
        (sol.y - project_dual_cones(sol.y, prog.cones)).norm();
    report.complementarity = std::abs(slack.dot(sol.y));
    report.primal_objective = prog.c.dot(sol.x);
    report.dual_objective = -prog.b.dot(sol.y);
    return report;
}

void dump_program(const ConicProgram& prog, std::ostream& os) {
    os << prog.num_vars() << ' ' << prog.num_rows() << ' ' << prog.cones.size()
       << '\n';
    for (const auto& cone : prog.cones) {
        switch (cone.type) {
            case ConeType::Zero: os << "zero "; break;
            case ConeType::NonNegative: os << "nonneg "; break;
            case ConeType::SecondOrder: os << "soc "; break;
        }
        os << cone.dim << '\n';
    }
    os << prog.a.nonZeros() << '\n';
    for (int j = 0; j < prog.a.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(prog.a, j); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    for (int i = 0; i < prog.num_rows(); ++i) os << prog.b[i] << '\n';
    for (int j = 0; j < prog.num_vars(); ++j) os << prog.c[j] << '\n';
}

}  // namespace fasris::conic
