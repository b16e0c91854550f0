#ifndef FASRIS_SCA_HPP
#define FASRIS_SCA_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

#include "fasris/channel.hpp"
#include "fasris/conic.hpp"
#include "fasris/link_metrics.hpp"

namespace fasris::sca {

// ---- complex (in)equalities used throughout the convexification ----

// 2*Re{b^H a} - ||b||^2, a global lower bound on ||a||^2, tight at a = b.
double norm_lower_bound(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// ( ||a+b||^2 - ||a-b||^2 ) / 4 and ( ||a-jb||^2 - ||a+jb||^2 ) / 4,
// equal to Re{a^H b} and Im{a^H b}.
std::pair<double, double> re_im_identities(const Eigen::VectorXcd& a,
                                           const Eigen::VectorXcd& b);

// ---- linearized signal model ----

// Decision vector z = (Re v, Im v, r) with v the relaxed unit-circle weights
// of the surface elements and r the (continuous) active-port indices.
// w(z) = base + jac * z for complex-valued w; jac columns follow z's layout.
struct ComplexAffineMap {
    Eigen::VectorXcd base;
    Eigen::MatrixXcd jac;

    Eigen::VectorXcd eval(const Eigen::VectorXd& z) const {
        return jac.cols() > 0 ? (base + jac * z).eval() : base;
    }
};

// Real affine functional over z.
struct AffineScalar {
    Eigen::VectorXd grad;
    double constant = 0.0;

    double eval(const Eigen::VectorXd& z) const {
        return grad.size() > 0 ? grad.dot(z) + constant : constant;
    }
};

// Iterate the surrogates are expanded around, with the cached signal value
// u = ell_bs(theta, r) * p_bs and the derived vector ell_bs^H u + p_bs.
struct ExpansionPoint {
    PhaseShiftVector theta;
    PortSelection ports;
    Eigen::VectorXcd u;
    Eigen::VectorXcd v_aux;

    static ExpansionPoint at(const ChannelSet& channels,
                             const TransmitPowers& powers,
                             const PhaseShiftVector& theta,
                             const PortSelection& ports);
};

// Affine-in-z model of every effective signal: exact in v for fixed ports,
// first-order in the port offsets around the expansion point.
struct LinearSignalModel {
    int n_ris = 0;
    int n_ports = 0;
    int n_tx = 0;
    double trust_radius = 0.0;
    Eigen::VectorXd r_expansion;
    Eigen::VectorXcd v_expansion;

    ComplexAffineMap signal;                      // ell_bs * p_bs, one entry per port
    std::vector<ComplexAffineMap> interference;   // ell_k * p_k
    // conjugated interferer rows a_{k,m}(z) = (row m of ell_k)^H, n_tx entries
    std::vector<std::vector<ComplexAffineMap>> interferer_rows;

    int z_dim() const { return 2 * n_ris + n_ports; }
    // packs (v, r) into z; r is absolute, internally converted to offsets
    Eigen::VectorXd pack(const Eigen::VectorXcd& v, const Eigen::VectorXd& r) const;
    Eigen::VectorXd pack_point() const { return pack(v_expansion, r_expansion); }
};

LinearSignalModel build_linear_signal_model(const ChannelSet& channels,
                                            const TransmitPowers& powers,
                                            const ExpansionPoint& point,
                                            double trust_radius);

// Concave (affine) lower bound f on the received signal power, tight at the
// expansion point and a global minorant in v.
AffineScalar signal_power_bound(const LinearSignalModel& model,
                                const ExpansionPoint& point);

// Convex upper bounds on +/-Re and +/-Im of one interferer's effective signal,
// one value per active port. Each is 1/4*(||a(z) - off||^2
// - 2*Re{x0^H (a(z) + off)} + ||x0||^2) with x0 = a^(n) + off, tight at the
// expansion point.
class InterferenceBounds {
  public:
    InterferenceBounds(const LinearSignalModel& model,
                       const TransmitPowers& powers, int interferer);

    int ports() const { return model_->n_ports; }
    int interferer() const { return interferer_; }

    // componentwise bounds: rho >= Re s_k, rho_bar >= -Re s_k,
    // omega >= Im s_k, omega_bar >= -Im s_k
    Eigen::VectorXd rho(const Eigen::VectorXd& z) const { return eval_variant(0, z); }
    Eigen::VectorXd rho_bar(const Eigen::VectorXd& z) const { return eval_variant(1, z); }
    Eigen::VectorXd omega(const Eigen::VectorXd& z) const { return eval_variant(2, z); }
    Eigen::VectorXd omega_bar(const Eigen::VectorXd& z) const { return eval_variant(3, z); }

    // pieces of bound `variant` (0..3 in the order above) for port m:
    // value = 0.25*(||a_scale*a(z) + q_offset||^2 + lin(z)), lin affine in z.
    // a_scale balances the channel rows against the transmit vector; the
    // bound values are unchanged by it.
    struct Pieces {
        const ComplexAffineMap* a = nullptr;
        double a_scale = 1.0;
        Eigen::VectorXcd q_offset;
        AffineScalar lin;
    };
    Pieces pieces(int variant, int port) const;

  private:
    Eigen::VectorXd eval_variant(int variant, const Eigen::VectorXd& z) const;

    const LinearSignalModel* model_;
    int interferer_;
    std::vector<double> balance_;                               // per port
    std::vector<std::array<Eigen::VectorXcd, 4>> lin_offsets_;  // per port, already /balance
    std::vector<Eigen::VectorXcd> a_at_point_;                  // per port, already *balance
};

// ---- convex subproblem ----

struct SCAParams {
    int max_iters = 50;            // outer iteration cap
    int min_iterations = 3;        // steps taken before convergence can fire
    double tolerance = 1e-3;       // stop when |rate change| drops below this
    double step = 0.5;             // relaxation step applied to the update
    double regularization = 1e-3;  // weight pushing |v_i| toward 1
    double trust_radius = 1.0;     // per-iteration port movement bound
    double gamma_db = 0.0;         // SINR target of the QoS constraint
    double noise_power = 1e-13;    // receiver noise power, watts
    bool optimize_ports = true;
    int max_backtracks = 3;
    int max_stalls = 3;            // consecutive rejected steps before giving up
    int extension_steps = 3;       // doubling continuations of an accepted move
    int restoration_iters = 5;
    double interference_weight_cap = 1e4;
    conic::SolverSettings solver = default_subproblem_solver();

    double gamma_linear() const { return std::pow(10.0, gamma_db / 10.0); }
    static conic::SolverSettings default_subproblem_solver();
};

struct SubproblemSpec {
    conic::ConicProgram program;
    int n_ris = 0, n_ports = 0, n_interferers = 0;
    // variable offsets, -1 when the block is absent
    int v_re_at = -1, v_im_at = -1, r_at = -1;
    int rho_at = -1, rho_bar_at = -1, t_at = -1, viol_at = -1;
    double amplitude_scale = 1.0;     // signals were divided by this
    double interference_weight = 0.0;
    Eigen::VectorXd r_expansion;
    Eigen::VectorXcd v_expansion;

    Eigen::VectorXcd extract_v(const Eigen::VectorXd& x) const;
    Eigen::VectorXd extract_r(const Eigen::VectorXd& x) const;
};

SubproblemSpec assemble_subproblem(const ChannelSet& channels,
                                   const TransmitPowers& powers,
                                   const ExpansionPoint& point,
                                   const SCAParams& params,
                                   bool with_restoration_slack = false);

// arg(v) wrapped to [0, 2*pi), ports projected to the ordered feasible set
// (isotonic with unit gaps when continuous, rounded with greedy collision
// resolution when integer_mode).
std::pair<PhaseShiftVector, PortSelection> project_solution(
    const Eigen::VectorXcd& raw_v, const Eigen::VectorXd& raw_r, int num_ports,
    bool integer_mode);

// ---- outer loop ----

struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};
struct SolverFailure : std::runtime_error {
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

struct SCAState {
    ExpansionPoint point;
    int iteration = 0;
    double rate = 0.0;
    double sinr = 0.0;
    double surrogate = 0.0;  // signal power in noise units at the iterate
    double last_delta_rate = std::numeric_limits<double>::infinity();
    double last_step_movement = std::numeric_limits<double>::infinity();
    std::vector<double> rate_history;
    std::vector<double> surrogate_history;
    int accepted_steps = 0;
    int rejected_steps = 0;
    long total_solver_iterations = 0;
    double solve_seconds = 0.0;
    // warm start carried between subproblem solves
    Eigen::VectorXd warm_x, warm_s, warm_y;

    static SCAState initial(const ChannelSet& channels,
                            const TransmitPowers& powers,
                            const PhaseShiftVector& theta0,
                            const PortSelection& r0, double noise_power);
};

// One outer iteration: assemble, solve, project, relax, and accept the step
// only if neither the signal surrogate nor the rate decreases.
SCAState sca_step(const SCAState& state, const ChannelSet& channels,
                  const TransmitPowers& powers, const SCAParams& params);

struct SCAResult {
    PhaseShiftVector theta;
    PortSelection ports;  // integer mode
    double rate = 0.0;    // at the integer-projected ports
    double sinr = 0.0;
    std::vector<double> rate_history;
    std::vector<double> surrogate_history;
    int iterations = 0;
    bool converged = false;
    long total_solver_iterations = 0;
    double solve_seconds = 0.0;
    double mean_subproblem_seconds = 0.0;
};

struct SCAInit {
    PhaseShiftVector theta0;
    PortSelection r0;
};

SCAInit default_init(const ChannelSet& channels, int active_ports, Rng& rng);

SCAResult run_sca(const ChannelSet& channels, const TransmitPowers& powers,
                  const SCAParams& params, const SCAInit& init);

}  // namespace fasris::sca

#endif
