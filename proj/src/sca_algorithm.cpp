#include <chrono>
#include <cmath>
#include <sstream>

#include "fasris/log.hpp"
#include "fasris/sca.hpp"

namespace fasris::sca {

namespace {

struct Metrics {
    double signal_power = 0.0;
    double interference_power = 0.0;
    double sinr = 0.0;
    double rate = 0.0;
};

Metrics evaluate(const ChannelSet& channels, const TransmitPowers& powers,
                 const PhaseShiftVector& theta, const PortSelection& ports,
                 double noise_power) {
    const Channels mats = channels.materialize(ports.r);
    const EffectiveChannels ell = build_effective_channels(mats, theta);
    Metrics out;
    out.signal_power = (ell.ell_bs * powers.p_bs).squaredNorm();
    for (std::size_t k = 0; k < ell.ell_k.size(); ++k)
        out.interference_power += (ell.ell_k[k] * powers.p_k[k]).squaredNorm();
    out.sinr = out.signal_power /
               (out.interference_power + ports.size() * noise_power);
    out.rate = std::log2(1.0 + out.sinr);
    return out;
}

// componentwise shortest-arc interpolation between phase vectors
PhaseShiftVector interpolate_phases(const PhaseShiftVector& from,
                                    const PhaseShiftVector& to, double eta) {
    PhaseShiftVector out;
    out.theta.resize(from.theta.size());
    for (int i = 0; i < from.theta.size(); ++i) {
        double delta = std::fmod(to.theta[i] - from.theta[i], 2.0 * M_PI);
        if (delta > M_PI) delta -= 2.0 * M_PI;
        if (delta < -M_PI) delta += 2.0 * M_PI;
        out.theta[i] = wrap_angle(from.theta[i] + eta * delta);
    }
    return out;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

}  // namespace

SCAState SCAState::initial(const ChannelSet& channels,
                           const TransmitPowers& powers,
                           const PhaseShiftVector& theta0,
                           const PortSelection& r0, double noise_power) {
    SCAState state;
    state.point = ExpansionPoint::at(channels, powers, theta0, r0);
    const Metrics met = evaluate(channels, powers, theta0, r0, noise_power);
    state.rate = met.rate;
    state.sinr = met.sinr;
    state.surrogate = met.signal_power / noise_power;
    state.rate_history.push_back(met.rate);
    state.surrogate_history.push_back(state.surrogate);
    return state;
}

SCAState sca_step(const SCAState& state, const ChannelSet& channels,
                  const TransmitPowers& powers, const SCAParams& params) {
    const auto start = std::chrono::steady_clock::now();
    const SubproblemSpec spec =
        assemble_subproblem(channels, powers, state.point, params, false);

    conic::SolverSettings settings = params.solver;
    // refined solves once the outer loop is nearly stationary
    if (state.last_delta_rate < 30.0 * params.tolerance)
        settings.tol = params.solver.tol / 10.0;
    if (state.warm_x.size() == spec.program.num_vars() &&
        state.warm_s.size() == spec.program.num_rows()) {
        settings.warm_x = state.warm_x;
        settings.warm_s = state.warm_s;
        settings.warm_y = state.warm_y;
    }
    const conic::SolverSolution sol = conic::solve(spec.program, settings);
    if (sol.status == conic::SolveStatus::Infeasible) {
        std::ostringstream msg;
        msg << "subproblem reported infeasible at iteration "
            << state.iteration << " (primal residual "
            << sol.residuals.primal << ")";
        throw SolverFailure(msg.str());
    }

    SCAState next = state;
    next.iteration = state.iteration + 1;
    next.warm_x = sol.x;
    next.warm_s = sol.s;
    next.warm_y = sol.y;
    next.total_solver_iterations += sol.iterations;

    auto [theta_cand, ports_cand] =
        project_solution(spec.extract_v(sol.x), spec.extract_r(sol.x),
                         channels.layout.num_ports, false);
    if (spec.n_ris == 0) theta_cand = state.point.theta;

    // relaxation step with a merit gate: accept only if neither the signal
    // surrogate nor the rate moved backwards; halve the step otherwise
    double eta = params.step;
    bool accepted = false;
    PhaseShiftVector theta_new = state.point.theta;
    PortSelection ports_new = state.point.ports;
    Metrics met;
    for (int attempt = 0; attempt <= params.max_backtracks; ++attempt) {
        PhaseShiftVector theta_try =
            interpolate_phases(state.point.theta, theta_cand, eta);
        PortSelection ports_try = state.point.ports;
        ports_try.r = (1.0 - eta) * state.point.ports.r + eta * ports_cand.r;
        met = evaluate(channels, powers, theta_try, ports_try,
                       params.noise_power);
        const double surrogate_try = met.signal_power / params.noise_power;
        const double surrogate_gate =
            std::max(1e-9, 1e-13 * std::abs(state.surrogate));
        if (surrogate_try >= state.surrogate - surrogate_gate &&
            met.rate >= state.rate - 1e-9) {
            accepted = true;
            theta_new = std::move(theta_try);
            ports_new = std::move(ports_try);
            break;
        }
        eta /= 2.0;
    }

    if (accepted) {
        double movement = 0.0;
        for (int i = 0; i < theta_new.theta.size(); ++i) {
            double delta = std::abs(theta_new.theta[i] - state.point.theta.theta[i]);
            delta = std::min(delta, 2.0 * M_PI - delta);
            movement = std::max(movement, delta);
        }
        if (ports_new.size() > 0)
            movement = std::max(
                movement,
                (ports_new.r - state.point.ports.r).cwiseAbs().maxCoeff());
        next.last_step_movement = movement;
        next.point = ExpansionPoint::at(channels, powers, theta_new, ports_new);
        next.last_delta_rate = std::abs(met.rate - state.rate);
        next.rate = met.rate;
        next.sinr = met.sinr;
        next.surrogate = met.signal_power / params.noise_power;
        ++next.accepted_steps;
    } else {
        next.last_delta_rate = 0.0;
        next.last_step_movement = 0.0;
        ++next.rejected_steps;
    }
    next.rate_history.push_back(next.rate);
    next.surrogate_history.push_back(next.surrogate);
    next.solve_seconds += seconds_since(start);
    FASRIS_LOG_DEBUG(
        "sca iter %d: rate %.4f sinr %.3g surrogate %.6g accepted %d "
        "solver iters %d",
        next.iteration, next.rate, next.sinr, next.surrogate,
        accepted ? 1 : 0, sol.iterations);
    return next;
}

SCAInit default_init(const ChannelSet& channels, int active_ports, Rng& rng) {
    SCAInit init;
    init.theta0.theta.resize(channels.n_ris);
    for (int i = 0; i < channels.n_ris; ++i)
        init.theta0.theta[i] = rng.uniform(0.0, 2.0 * M_PI);
    init.r0 = spread_ports(active_ports, channels.layout.num_ports);
    return init;
}

SCAResult run_sca(const ChannelSet& channels, const TransmitPowers& powers,
                  const SCAParams& params, const SCAInit& init) {
    SCAState state = SCAState::initial(channels, powers, init.theta0, init.r0,
                                       params.noise_power);
    const double gamma = params.gamma_linear();

    // feasibility restoration: push the QoS constraint into the objective as
    // a penalized violation until the target is met
    if (state.sinr < gamma) {
        for (int attempt = 0;
             attempt < params.restoration_iters && state.sinr < gamma;
             ++attempt) {
            const SubproblemSpec spec =
                assemble_subproblem(channels, powers, state.point, params, true);
            const conic::SolverSolution sol =
                conic::solve(spec.program, params.solver);
            if (sol.status == conic::SolveStatus::Infeasible) break;
            auto [theta_new, ports_new] =
                project_solution(spec.extract_v(sol.x), spec.extract_r(sol.x),
                                 channels.layout.num_ports, false);
            if (spec.n_ris == 0) theta_new = state.point.theta;
            state.point =
                ExpansionPoint::at(channels, powers, theta_new, ports_new);
            const Metrics met = evaluate(channels, powers, theta_new, ports_new,
                                         params.noise_power);
            state.rate = met.rate;
            state.sinr = met.sinr;
            state.surrogate = met.signal_power / params.noise_power;
            state.iteration += 1;
            FASRIS_LOG_DEBUG("restoration iter %d: sinr %.3g target %.3g",
                             state.iteration, state.sinr, gamma);
        }
        if (state.sinr < gamma * (1.0 - 1e-9)) {
            std::ostringstream msg;
            msg << "no feasible design found: SINR target " << gamma
                << " (linear), best achieved " << state.sinr << " after "
                << state.iteration << " restoration iterations";
            throw InfeasibleError(msg.str());
        }
        // restart histories from the feasible point
        state.rate_history = {state.rate};
        state.surrogate_history = {state.surrogate};
    }

    // continues an accepted move along its own direction while the merit
    // keeps improving; the bounded subproblem steps otherwise make long port
    // migrations take one short hop per iteration
    auto extend_move = [&](const SCAState& before, SCAState& after) {
        Eigen::VectorXd dtheta(after.point.theta.theta.size());
        for (int i = 0; i < dtheta.size(); ++i) {
            double delta = std::fmod(after.point.theta.theta[i] -
                                         before.point.theta.theta[i],
                                     2.0 * M_PI);
            if (delta > M_PI) delta -= 2.0 * M_PI;
            if (delta < -M_PI) delta += 2.0 * M_PI;
            dtheta[i] = delta;
        }
        const Eigen::VectorXd dr = after.point.ports.r - before.point.ports.r;
        double scale = 1.0;
        for (int ext = 0; ext < params.extension_steps; ++ext) {
            PhaseShiftVector theta_try;
            theta_try.theta = after.point.theta.theta + scale * dtheta;
            for (int i = 0; i < theta_try.theta.size(); ++i)
                theta_try.theta[i] = wrap_angle(theta_try.theta[i]);
            PortSelection ports_try = after.point.ports;
            if (params.optimize_ports && dr.size() > 0) {
                auto [ignored, projected] = project_solution(
                    Eigen::VectorXcd(0), after.point.ports.r + scale * dr,
                    channels.layout.num_ports, false);
                ports_try = projected;
            }
            const Metrics met = evaluate(channels, powers, theta_try, ports_try,
                                         params.noise_power);
            const double surrogate_try = met.signal_power / params.noise_power;
            if (surrogate_try < after.surrogate - 1e-9 ||
                met.rate < after.rate + 1e-12)
                break;
            after.point =
                ExpansionPoint::at(channels, powers, theta_try, ports_try);
            after.last_delta_rate = std::abs(met.rate - before.rate);
            after.rate = met.rate;
            after.sinr = met.sinr;
            after.surrogate = surrogate_try;
            after.rate_history.back() = met.rate;
            after.surrogate_history.back() = after.surrogate;
            scale *= 2.0;
        }
    };

    bool converged = false;
    int stalls = 0;
    int steps_taken = 0;
    while (state.iteration < params.max_iters) {
        const int accepted_before = state.accepted_steps;
        const SCAState before = state;
        state = sca_step(state, channels, powers, params);
        ++steps_taken;
        const bool accepted = state.accepted_steps != accepted_before;
        if (accepted && state.last_step_movement > 1e-12)
            extend_move(before, state);
        stalls = accepted ? 0 : stalls + 1;
        if (accepted && state.last_step_movement <= 1e-12) {
            converged = true;  // the subproblem optimum is the iterate itself
            break;
        }
        if (stalls >= params.max_stalls) {
            converged = true;  // no acceptable movement at this expansion
            break;
        }
        if (steps_taken >= params.min_iterations && accepted &&
            state.last_delta_rate < params.tolerance) {
            converged = true;
            break;
        }
    }

    SCAResult result;
    PhaseShiftVector theta_final = state.point.theta;
    PortSelection ports_final = project_solution(
        state.point.theta.unit_vector(), state.point.ports.r,
        channels.layout.num_ports, true).second;
    // the rounding rule gives one candidate; the floor/ceil neighborhood of
    // the continuous solution often contains a strictly better grid point
    {
        const int ml = state.point.ports.size();
        double best_rate = evaluate(channels, powers, theta_final, ports_final,
                                    params.noise_power).rate;
        for (int mask = 0; mask < (1 << ml); ++mask) {
            PortSelection candidate;
            candidate.integer_mode = true;
            candidate.r.resize(ml);
            bool valid = true;
            for (int m = 0; m < ml && valid; ++m) {
                const double base = (mask >> m) & 1
                                        ? std::ceil(state.point.ports.r[m])
                                        : std::floor(state.point.ports.r[m]);
                candidate.r[m] = base;
                if (base < 1 || base > channels.layout.num_ports) valid = false;
                if (m > 0 && candidate.r[m] - candidate.r[m - 1] < 1.0)
                    valid = false;
            }
            if (!valid) continue;
            const double rate = evaluate(channels, powers, theta_final,
                                         candidate, params.noise_power).rate;
            if (rate > best_rate + 1e-12) {
                best_rate = rate;
                ports_final = candidate;
            }
        }
    }
    Metrics met = evaluate(channels, powers, theta_final, ports_final,
                           params.noise_power);
    // re-tune phases for the snapped ports when the snap cost real rate
    if (!state.rate_history.empty() &&
        met.rate < state.rate_history.back() - params.tolerance &&
        channels.n_ris > 0) {
        SCAParams polish = params;
        polish.optimize_ports = false;
        polish.max_iters = 5;
        polish.min_iterations = 1;
        SCAState polish_state = SCAState::initial(
            channels, powers, theta_final, ports_final, params.noise_power);
        for (int it = 0; it < polish.max_iters; ++it) {
            const SCAState next =
                sca_step(polish_state, channels, powers, polish);
            const bool progressed = next.rate > polish_state.rate + 1e-12;
            polish_state = next;
            if (!progressed) break;
        }
        if (polish_state.rate > met.rate) {
            theta_final = polish_state.point.theta;
            met = evaluate(channels, powers, theta_final, ports_final,
                           params.noise_power);
        }
    }
    result.theta = theta_final;
    result.ports = ports_final;
    result.rate = met.rate;
    result.sinr = met.sinr;
    result.rate_history = state.rate_history;
    result.surrogate_history = state.surrogate_history;
    result.iterations = state.iteration;
    result.converged = converged;
    result.total_solver_iterations = state.total_solver_iterations;
    result.solve_seconds = state.solve_seconds;
    result.mean_subproblem_seconds =
        state.iteration > 0 ? state.solve_seconds / state.iteration : 0.0;
    return result;
}

}  // namespace fasris::sca
