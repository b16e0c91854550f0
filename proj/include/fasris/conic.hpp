#ifndef FASRIS_CONIC_HPP
#define FASRIS_CONIC_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <utility>
#include <vector>

namespace fasris::conic {

enum class ConeType { Zero, NonNegative, SecondOrder };

struct Cone {
    ConeType type;
    int dim;
};

// Standard-form program: minimize c'x subject to A*x + b in K, where K is a
// product of zero, nonnegative and second-order cones covering all m rows.
// Second-order blocks are ordered (t, x) with ||x|| <= t.
struct ConicProgram {
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> a;
    Eigen::VectorXd b;
    std::vector<Cone> cones;

    int num_vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(b.size()); }
    void validate() const;  // throws std::invalid_argument
};

// Euclidean projection onto the second-order cone {(t, x): ||x|| <= t}.
std::pair<double, Eigen::VectorXd> soc_project(double t,
                                               const Eigen::VectorXd& x);

// Projection onto the product cone / its dual, blockwise.
Eigen::VectorXd project_cones(const Eigen::VectorXd& v,
                              const std::vector<Cone>& cones);
Eigen::VectorXd project_dual_cones(const Eigen::VectorXd& v,
                                   const std::vector<Cone>& cones);
double cone_distance(const Eigen::VectorXd& v, const std::vector<Cone>& cones);

enum class SolveStatus { Optimal, MaxIters, Infeasible };

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double max() const { return std::max(primal, std::max(dual, gap)); }
};

struct SolverSettings {
    double tol = 1e-7;
    double tol_gap = -1.0;  // gap tolerance; < 0 means same as tol
    int max_iters = 50000;
    double rho = 1.0;
    double sigma = 1e-6;
    double over_relaxation = 1.5;
    int check_interval = 25;
    bool adaptive_rho = true;
    int equilibration_sweeps = 10;
    bool verbose = false;  // residual trace on stderr at every check
    // warm start in original (unscaled) coordinates; empty = cold start
    Eigen::VectorXd warm_x, warm_s, warm_y;
};

struct SolverSolution {
    Eigen::VectorXd x;  // primal
    Eigen::VectorXd y;  // dual, y in K*, A'y ~= c
    Eigen::VectorXd s;  // slack, s ~= A*x + b in K
    SolveStatus status = SolveStatus::MaxIters;
    Residuals residuals;
    int iterations = 0;
    double objective = 0.0;       // c'x
    double dual_objective = 0.0;  // -b'y, <= objective at optimality
};

SolverSolution solve(const ConicProgram& prog, const SolverSettings& settings = {});

struct ResidualReport {
    double primal_cone_dist = 0.0;  // dist(A*x + b, K)
    double dual_eq = 0.0;           // ||c - A'y||
    double dual_cone_dist = 0.0;    // dist(y, K*)
    double complementarity = 0.0;   // |<A*x + b, y>|
    double primal_objective = 0.0;
    double dual_objective = 0.0;
};

// Recomputes feasibility and optimality residuals from scratch.
ResidualReport verify_solution(const ConicProgram& prog,
                               const SolverSolution& sol);

// Plain-text dump: "n m n_cones", one "type dim" line per cone, "nnz" and
// 0-based COO triplets of A, then b entries, then c entries.
void dump_program(const ConicProgram& prog, std::ostream& os);

}  // namespace fasris::conic

#endif
