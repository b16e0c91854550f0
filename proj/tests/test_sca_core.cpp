#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fasris/baselines.hpp"
#include "fasris/sca.hpp"

using namespace fasris;
using namespace fasris::sca;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig config;
    config.n_ris = 8;
    config.num_ports = 12;
    config.active_ports = 3;
    config.n_interferers = 2;
    return config;
}

struct Instance {
    ScenarioConfig config;
    ChannelSet set;
    TransmitPowers powers;
    double noise;
    ExpansionPoint point;
    LinearSignalModel model;
};

Instance make_instance(std::uint64_t seed, ScenarioConfig config) {
    Rng rng(seed);
    Instance inst{config, sample_scenario(config, rng),
                  make_transmit_powers(config), config.noise_power_w(),
                  {}, {}};
    Rng phase_rng(substream(seed, 1));
    PhaseShiftVector theta;
    theta.theta.resize(config.n_ris);
    for (int i = 0; i < config.n_ris; ++i)
        theta.theta[i] = phase_rng.uniform(0.0, 2.0 * M_PI);
    // interior selection so finite differences never cross a port boundary
    PortSelection ports = spread_ports(config.active_ports, config.num_ports);
    ports.r = ports.r.unaryExpr([&](double r) {
        return std::clamp(r, 2.0, config.num_ports - 2.0);
    });
    inst.point = ExpansionPoint::at(inst.set, inst.powers, theta, ports);
    inst.model = build_linear_signal_model(inst.set, inst.powers, inst.point, 1.0);
    return inst;
}

// true effective signal at arbitrary (v, r), v not necessarily unit-modulus
Eigen::VectorXcd true_signal(const Instance& inst, const Eigen::VectorXcd& v,
                             const Eigen::VectorXd& r, int interferer = -1) {
    const Channels mats = inst.set.materialize(r);
    if (interferer < 0) {
        Eigen::MatrixXcd ell = mats.h_bs;
        if (inst.set.n_ris > 0) ell += ris_cascade(mats.h_d, v, mats.g_bs);
        return ell * inst.powers.p_bs;
    }
    Eigen::MatrixXcd ell = mats.h_k[interferer];
    if (inst.set.n_ris > 0) ell += ris_cascade(mats.h_d, v, mats.g_k[interferer]);
    return ell * inst.powers.p_k[interferer];
}

Eigen::VectorXcd random_ball_v(int n, Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double mag = std::sqrt(rng.uniform());
        v[i] = std::polar(mag, rng.uniform(0.0, 2.0 * M_PI));
    }
    return v;
}

}  // namespace

TEST_CASE("complex norm and inner-product identities") {
    Rng rng(41);
    SUBCASE("norm lower bound examples") {
        Eigen::VectorXcd a(1), b(1);
        a << std::complex<double>(3.0, 0.0);
        b << std::complex<double>(1.0, 0.0);
        CHECK(norm_lower_bound(a, b) == doctest::Approx(5.0));
        CHECK(norm_lower_bound(a, a) == doctest::Approx(a.squaredNorm()));
        CHECK_THROWS_AS(norm_lower_bound(a, Eigen::VectorXcd(2)),
                        std::invalid_argument);
    }
    SUBCASE("single-entry identity example") {
        Eigen::VectorXcd a(1), b(1);
        a << std::complex<double>(1.0, 0.0);
        b << std::complex<double>(0.0, 1.0);
        const auto [re, im] = re_im_identities(a, b);
        CHECK(re == doctest::Approx(0.0));
        CHECK(im == doctest::Approx(1.0));
    }
    SUBCASE("a = b real collapses to the squared norm") {
        Eigen::VectorXcd a(3);
        a << 1.0, -2.0, 0.5;
        const auto [re, im] = re_im_identities(a, a);
        CHECK(re == doctest::Approx(a.squaredNorm()));
        CHECK(im == doctest::Approx(0.0));
    }
    SUBCASE("identities and bound hold over random pairs") {
        int failures = 0;
        for (int trial = 0; trial < 100000; ++trial) {
            Eigen::VectorXcd a(3), b(3);
            for (int i = 0; i < 3; ++i) {
                a[i] = rng.complex_normal();
                b[i] = rng.complex_normal();
            }
            const auto [re, im] = re_im_identities(a, b);
            const std::complex<double> inner = a.dot(b);  // a^H b
            if (std::abs(re - inner.real()) >= 1e-12) ++failures;
            if (std::abs(im - inner.imag()) >= 1e-12) ++failures;
            if (norm_lower_bound(a, b) > a.squaredNorm() + 1e-12) ++failures;
        }
        CHECK(failures == 0);
    }
}

TEST_CASE("linearized signal model") {
    const Instance inst = make_instance(7, small_config());
    const auto& model = inst.model;
    const Eigen::VectorXd z_point = model.pack_point();

    SUBCASE("reproduces the cached signal at the expansion point") {
        const Eigen::VectorXcd s = model.signal.eval(z_point);
        CHECK((s - inst.point.u).norm() < 1e-10 * (1.0 + inst.point.u.norm()));
    }
    SUBCASE("exact in the surface weights at fixed ports") {
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXcd v = random_ball_v(model.n_ris, rng);
            const Eigen::VectorXd z = model.pack(v, model.r_expansion);
            const Eigen::VectorXcd via_model = model.signal.eval(z);
            const Eigen::VectorXcd exact =
                true_signal(inst, v, model.r_expansion);
            CHECK((via_model - exact).norm() < 1e-10 * (1.0 + exact.norm()));
            for (int k = 0; k < 2; ++k) {
                const Eigen::VectorXcd mk = model.interference[k].eval(z);
                const Eigen::VectorXcd ek =
                    true_signal(inst, v, model.r_expansion, k);
                CHECK((mk - ek).norm() < 1e-10 * (1.0 + ek.norm()));
            }
        }
    }
    SUBCASE("single-phase perturbations are reproduced exactly") {
        PhaseShiftVector theta = inst.point.theta;
        theta.theta[2] = wrap_angle(theta.theta[2] + 0.8);
        const Eigen::VectorXcd v = theta.unit_vector();
        const Eigen::VectorXcd via_model =
            model.signal.eval(model.pack(v, model.r_expansion));
        const Eigen::VectorXcd exact = true_signal(inst, v, model.r_expansion);
        CHECK((via_model - exact).norm() < 1e-10 * (1.0 + exact.norm()));
    }
    SUBCASE("small port moves stay within first-order error") {
        const Eigen::VectorXcd v = model.v_expansion;
        Eigen::VectorXd r = model.r_expansion;
        r[1] += 1e-4;
        const Eigen::VectorXcd via_model = model.signal.eval(model.pack(v, r));
        const Eigen::VectorXcd exact = true_signal(inst, v, r);
        CHECK((via_model - exact).norm() <= 1e-6 * exact.norm());
    }
    SUBCASE("port jacobian matches central finite differences") {
        const double step = 1e-5;
        const Eigen::VectorXcd v = model.v_expansion;
        for (int m = 0; m < model.n_ports; ++m) {
            Eigen::VectorXd r_hi = model.r_expansion;
            Eigen::VectorXd r_lo = model.r_expansion;
            r_hi[m] += step;
            r_lo[m] -= step;
            const Eigen::VectorXcd fd =
                (true_signal(inst, v, r_hi) - true_signal(inst, v, r_lo)) /
                (2.0 * step);
            const Eigen::VectorXcd analytic =
                model.signal.jac.col(2 * model.n_ris + m);
            CHECK((fd - analytic).norm() <= 1e-4 * (1.0 + fd.norm()));
        }
    }
    SUBCASE("rejects a non-positive trust radius") {
        CHECK_THROWS_AS(build_linear_signal_model(inst.set, inst.powers,
                                                  inst.point, 0.0),
                        std::domain_error);
    }
}

TEST_CASE("concave signal power bound") {
    const Instance inst = make_instance(19, small_config());
    const AffineScalar f = signal_power_bound(inst.model, inst.point);
    const Eigen::VectorXd z_point = inst.model.pack_point();

    SUBCASE("tight at the expansion point") {
        CHECK(std::abs(f.eval(z_point) - inst.point.u.squaredNorm()) <=
              1e-9 * (1.0 + inst.point.u.squaredNorm()));
    }
    SUBCASE("global minorant over the weight ball at fixed ports") {
        Rng rng(5);
        int violations = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            const Eigen::VectorXcd v = random_ball_v(inst.model.n_ris, rng);
            const Eigen::VectorXd z = inst.model.pack(v, inst.model.r_expansion);
            const double exact =
                true_signal(inst, v, inst.model.r_expansion).squaredNorm();
            if (f.eval(z) > exact + 1e-9 * (1.0 + exact)) ++violations;
        }
        CHECK(violations == 0);
    }
    SUBCASE("zero signal at the expansion gives the zero bound") {
        Instance zero = inst;
        zero.powers.p_bs.setZero();
        zero.point = ExpansionPoint::at(zero.set, zero.powers,
                                        inst.point.theta, inst.point.ports);
        zero.model =
            build_linear_signal_model(zero.set, zero.powers, zero.point, 1.0);
        const AffineScalar f0 = signal_power_bound(zero.model, zero.point);
        CHECK(std::abs(f0.constant) == doctest::Approx(0.0));
        CHECK(f0.grad.norm() == doctest::Approx(0.0));
    }
    SUBCASE("regularizer form is itself a valid lower bound") {
        Rng rng(8);
        const Eigen::VectorXcd v_n = inst.model.v_expansion;
        int violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXcd v(v_n.size());
            for (int i = 0; i < v.size(); ++i) v[i] = rng.complex_normal(2.0);
            const double lhs = 2.0 * std::real(v_n.dot(v)) - v_n.squaredNorm();
            if (lhs > v.squaredNorm() + 1e-12) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("interference bounds") {
    const Instance inst = make_instance(23, small_config());
    const Eigen::VectorXd z_point = inst.model.pack_point();

    SUBCASE("tight sandwich at the expansion point") {
        for (int k = 0; k < 2; ++k) {
            const InterferenceBounds bounds(inst.model, inst.powers, k);
            const Eigen::VectorXcd s_k =
                inst.model.interference[k].eval(z_point);
            const Eigen::VectorXd rho = bounds.rho(z_point);
            const Eigen::VectorXd rho_bar = bounds.rho_bar(z_point);
            const Eigen::VectorXd omega = bounds.omega(z_point);
            const Eigen::VectorXd omega_bar = bounds.omega_bar(z_point);
            for (int m = 0; m < inst.model.n_ports; ++m) {
                const double scale = 1.0 + std::abs(s_k[m]);
                CHECK(std::abs(rho[m] - s_k[m].real()) < 1e-9 * scale);
                CHECK(std::abs(rho_bar[m] + s_k[m].real()) < 1e-9 * scale);
                CHECK(std::abs(omega[m] - s_k[m].imag()) < 1e-9 * scale);
                CHECK(std::abs(omega_bar[m] + s_k[m].imag()) < 1e-9 * scale);
                CHECK(std::max(rho[m], rho_bar[m]) >=
                      std::abs(s_k[m].real()) - 1e-9 * scale);
            }
        }
    }
    SUBCASE("upper bounds hold everywhere for the modeled signal") {
        Rng rng(31);
        const InterferenceBounds bounds(inst.model, inst.powers, 0);
        int violations = 0;
        for (int trial = 0; trial < 2000; ++trial) {
            Eigen::VectorXcd v = random_ball_v(inst.model.n_ris, rng);
            Eigen::VectorXd r = inst.model.r_expansion;
            for (int m = 0; m < r.size(); ++m) r[m] += rng.uniform(-1.0, 1.0);
            const Eigen::VectorXd z = inst.model.pack(v, r);
            const Eigen::VectorXcd s_k = inst.model.interference[0].eval(z);
            const Eigen::VectorXd rho = bounds.rho(z);
            const Eigen::VectorXd rho_bar = bounds.rho_bar(z);
            const Eigen::VectorXd omega = bounds.omega(z);
            const Eigen::VectorXd omega_bar = bounds.omega_bar(z);
            for (int m = 0; m < inst.model.n_ports; ++m) {
                const double tol = 1e-9 * (1.0 + std::abs(s_k[m]));
                if (rho[m] < s_k[m].real() - tol) ++violations;
                if (rho_bar[m] < -s_k[m].real() - tol) ++violations;
                if (omega[m] < s_k[m].imag() - tol) ++violations;
                if (omega_bar[m] < -s_k[m].imag() - tol) ++violations;
            }
        }
        CHECK(violations == 0);
    }
    SUBCASE("midpoint convexity on random segments") {
        Rng rng(37);
        const InterferenceBounds bounds(inst.model, inst.powers, 1);
        const int nz = inst.model.z_dim();
        int violations = 0;
        for (int trial = 0; trial < 2000; ++trial) {
            Eigen::VectorXd za(nz), zb(nz);
            for (int i = 0; i < nz; ++i) {
                za[i] = rng.normal();
                zb[i] = rng.normal();
            }
            const Eigen::VectorXd mid = 0.5 * (za + zb);
            auto check_convex = [&](auto&& fn) {
                const Eigen::VectorXd at_mid = fn(mid);
                const Eigen::VectorXd avg = 0.5 * (fn(za) + fn(zb));
                for (int m = 0; m < at_mid.size(); ++m)
                    if (at_mid[m] > avg[m] + 1e-9 * (1.0 + std::abs(avg[m])))
                        ++violations;
            };
            check_convex([&](const Eigen::VectorXd& z) { return bounds.rho(z); });
            check_convex([&](const Eigen::VectorXd& z) { return bounds.rho_bar(z); });
            check_convex([&](const Eigen::VectorXd& z) { return bounds.omega(z); });
            check_convex([&](const Eigen::VectorXd& z) { return bounds.omega_bar(z); });
        }
        CHECK(violations == 0);
    }
    SUBCASE("zero interference channel evaluates to zero at expansion") {
        Instance quiet = inst;
        quiet.set.interferer_links[0].tx_projected.setZero();
        quiet.set.g_k[0].setZero();
        quiet.model = build_linear_signal_model(quiet.set, quiet.powers,
                                                quiet.point, 1.0);
        const InterferenceBounds bounds(quiet.model, quiet.powers, 0);
        const Eigen::VectorXd z = quiet.model.pack_point();
        CHECK(bounds.rho(z).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(bounds.rho_bar(z).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(bounds.omega(z).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(bounds.omega_bar(z).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("out-of-range interferer index") {
        CHECK_THROWS_AS(InterferenceBounds(inst.model, inst.powers, 5),
                        std::out_of_range);
    }
}

TEST_CASE("subproblem assembly") {
    ScenarioConfig config = small_config();
    const Instance inst = make_instance(47, config);
    SCAParams params;
    params.noise_power = inst.noise;

    SUBCASE("variable bookkeeping matches 2N + m_l + 2K plus auxiliaries") {
        const SubproblemSpec spec =
            assemble_subproblem(inst.set, inst.powers, inst.point, params);
        const int n = config.n_ris, ml = config.active_ports,
                  k = config.n_interferers;
        CHECK(spec.program.num_vars() == 2 * n + ml + 2 * k + k);
        CHECK(spec.t_at == 2 * n + ml + 2 * k);
    }
    SUBCASE("no interferers means no slack variables") {
        ScenarioConfig quiet = config;
        quiet.n_interferers = 0;
        const Instance inst0 = make_instance(48, quiet);
        SCAParams p0 = params;
        p0.noise_power = inst0.noise;
        const SubproblemSpec spec =
            assemble_subproblem(inst0.set, inst0.powers, inst0.point, p0);
        CHECK(spec.program.num_vars() == 2 * quiet.n_ris + quiet.active_ports);
        CHECK(spec.rho_at == -1);
        CHECK(spec.t_at == -1);
    }
    SUBCASE("the expansion point is feasible when the QoS constraint holds") {
        const SubproblemSpec spec =
            assemble_subproblem(inst.set, inst.powers, inst.point, params);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.program.num_vars());
        for (int i = 0; i < spec.n_ris; ++i) {
            x[spec.v_re_at + i] = spec.v_expansion[i].real();
            x[spec.v_im_at + i] = spec.v_expansion[i].imag();
        }
        for (int m = 0; m < spec.n_ports; ++m)
            x[spec.r_at + m] = spec.r_expansion[m];
        const Eigen::VectorXd z = inst.model.pack_point();
        double interference = 0.0;
        for (int k = 0; k < spec.n_interferers; ++k) {
            // the norm slacks dominate the componentwise bounds at expansion
            const Eigen::VectorXcd s_k = inst.model.interference[k].eval(z);
            const double rho = s_k.real().norm() / spec.amplitude_scale;
            const double rho_bar = s_k.imag().norm() / spec.amplitude_scale;
            x[spec.rho_at + k] = rho;
            x[spec.rho_bar_at + k] = rho_bar;
            x[spec.t_at + k] = rho * rho + rho_bar * rho_bar;
            interference += s_k.squaredNorm();
        }
        const double sinr =
            inst.point.u.squaredNorm() /
            (inst.noise * spec.n_ports + interference);
        REQUIRE(sinr >= params.gamma_linear());
        const double dist = conic::cone_distance(
            spec.program.a * x + spec.program.b, spec.program.cones);
        CHECK(dist <= 1e-7 * (1.0 + x.norm()));
    }
}

TEST_CASE("solution projection") {
    SUBCASE("identity on feasible input") {
        Eigen::VectorXcd v(2);
        v << std::polar(1.0, 0.3), std::polar(1.0, 5.9);
        Eigen::VectorXd r(3);
        r << 2, 5, 9;
        const auto [theta, ports] = project_solution(v, r, 20, true);
        CHECK(theta.theta[0] == doctest::Approx(0.3));
        CHECK(theta.theta[1] == doctest::Approx(5.9));
        CHECK(ports.r[0] == doctest::Approx(2));
        CHECK(ports.r[2] == doctest::Approx(9));
    }
    SUBCASE("integer rounding resolves collisions upward") {
        const auto [theta, ports] = project_solution(
            Eigen::VectorXcd(0), (Eigen::VectorXd(2) << 2.4, 2.6).finished(),
            20, true);
        CHECK(ports.r[0] == doctest::Approx(2));
        CHECK(ports.r[1] == doctest::Approx(3));
    }
    SUBCASE("collisions at the top are pushed back down") {
        const auto [theta, ports] = project_solution(
            Eigen::VectorXcd(0),
            (Eigen::VectorXd(3) << 19.6, 19.7, 19.8).finished(), 20, true);
        CHECK(ports.r[0] == doctest::Approx(18));
        CHECK(ports.r[1] == doctest::Approx(19));
        CHECK(ports.r[2] == doctest::Approx(20));
    }
    SUBCASE("zero weights map to phase zero") {
        Eigen::VectorXcd v(1);
        v << std::complex<double>(0.0, 0.0);
        const auto [theta, ports] =
            project_solution(v, (Eigen::VectorXd(1) << 3.0).finished(), 5, true);
        CHECK(theta.theta[0] == doctest::Approx(0.0));
    }
    SUBCASE("continuous mode restores ordering with unit gaps") {
        const auto [theta, ports] = project_solution(
            Eigen::VectorXcd(0),
            (Eigen::VectorXd(3) << 5.0, 4.6, 7.0).finished(), 20, false);
        CHECK(ports.r[1] - ports.r[0] >= 1.0 - 1e-12);
        CHECK(ports.r[2] - ports.r[1] >= 1.0 - 1e-12);
        CHECK(ports.r[0] >= 1.0);
        CHECK(ports.r[2] <= 20.0);
        const auto [theta2, ports2] =
            project_solution(Eigen::VectorXcd(0), ports.r, 20, false);
        CHECK((ports2.r - ports.r).norm() < 1e-12);
    }
    SUBCASE("more active ports than ports is impossible") {
        CHECK_THROWS_AS(
            project_solution(Eigen::VectorXcd(0),
                             (Eigen::VectorXd(3) << 1, 2, 3).finished(), 2,
                             true),
            InfeasibleError);
    }
}

TEST_CASE("single optimization steps") {
    const ScenarioConfig config = small_config();
    const Instance inst = make_instance(61, config);
    SCAParams params;
    params.noise_power = inst.noise;

    SCAState state = SCAState::initial(inst.set, inst.powers, inst.point.theta,
                                       inst.point.ports, inst.noise);

    SUBCASE("zero step leaves the iterate unchanged") {
        SCAParams frozen = params;
        frozen.step = 0.0;
        const SCAState next = sca_step(state, inst.set, inst.powers, frozen);
        CHECK(next.iteration == state.iteration + 1);
        CHECK(next.rate == doctest::Approx(state.rate));
        CHECK((next.point.ports.r - state.point.ports.r).norm() <= 1e-12);
        CHECK((next.point.theta.theta - state.point.theta.theta).norm() <=
              1e-12);
    }
    SUBCASE("full step jumps to the projected subproblem solution") {
        SCAParams full = params;
        full.step = 1.0;
        full.max_backtracks = 0;
        const SubproblemSpec spec =
            assemble_subproblem(inst.set, inst.powers, inst.point, full);
        const auto sol = conic::solve(spec.program, full.solver);
        const auto [theta_cand, ports_cand] =
            project_solution(spec.extract_v(sol.x), spec.extract_r(sol.x),
                             config.num_ports, false);
        const SCAState next = sca_step(state, inst.set, inst.powers, full);
        if (next.accepted_steps > 0) {
            CHECK((next.point.ports.r - ports_cand.r).norm() < 1e-9);
            CHECK((next.point.theta.theta - theta_cand.theta).norm() < 1e-9);
        }
    }
    SUBCASE("surrogate and rate never decrease across accepted steps") {
        SCAState current = state;
        for (int it = 0; it < 6; ++it) {
            const SCAState next =
                sca_step(current, inst.set, inst.powers, params);
            CHECK(next.surrogate >= current.surrogate - 1e-6);
            CHECK(next.rate >= current.rate - 1e-9);
            current = next;
        }
        CHECK(current.accepted_steps > 0);
        CHECK(current.rate > state.rate);
    }
}

TEST_CASE("full runs") {
    SUBCASE("nothing to optimize converges immediately") {
        ScenarioConfig config;
        config.n_ris = 0;
        config.n_interferers = 0;
        config.num_ports = 6;
        config.active_ports = 6;  // every port active: no freedom left
        Rng rng(3);
        const ChannelSet set = sample_scenario(config, rng);
        const TransmitPowers powers = make_transmit_powers(config);
        SCAParams params;
        params.noise_power = config.noise_power_w();
        SCAInit init;
        init.theta0.theta.resize(0);
        init.r0 = spread_ports(6, 6);
        const SCAResult result = run_sca(set, powers, params, init);
        CHECK(result.iterations <= 2);
        CHECK(result.converged);
        PortSelection all;
        all.r.resize(6);
        all.r << 1, 2, 3, 4, 5, 6;
        PhaseShiftVector empty;
        empty.theta.resize(0);
        const double direct =
            evaluate_rate(set, all, empty, powers, params.noise_power);
        CHECK(result.rate == doctest::Approx(direct).epsilon(1e-9));
    }
    SUBCASE("restoration lifts an infeasible start or reports failure") {
        ScenarioConfig config = small_config();
        Rng rng(61);
        const ChannelSet set = sample_scenario(config, rng);
        const TransmitPowers powers = make_transmit_powers(config);
        SCAParams params;
        params.noise_power = config.noise_power_w();
        Rng init_rng(62);
        const SCAInit init = default_init(set, 3, init_rng);
        const double init_sinr =
            evaluate_sinr(set, init.r0, init.theta0, powers, params.noise_power);

        // a target sitting above the start but below the optimum
        SCAParams reachable = params;
        reachable.gamma_db = 10.0 * std::log10(init_sinr) + 2.0;
        const SCAResult restored = run_sca(set, powers, reachable, init);
        CHECK(restored.sinr >= reachable.gamma_linear() * (1.0 - 1e-6));

        SCAParams impossible = params;
        impossible.gamma_db = 80.0;
        CHECK_THROWS_AS(run_sca(set, powers, impossible, init),
                        InfeasibleError);
    }
    SUBCASE("small instance reaches most of the exhaustive optimum") {
        ScenarioConfig config;
        config.n_ris = 2;
        config.num_ports = 6;
        config.active_ports = 2;
        config.n_interferers = 2;
        Rng rng(11);
        const ChannelSet set = sample_scenario(config, rng);
        const TransmitPowers powers = make_transmit_powers(config);
        SCAParams params;
        params.noise_power = config.noise_power_w();
        Rng init_rng(13);
        const SCAResult result =
            run_sca(set, powers, params, default_init(set, 2, init_rng));
        const auto oracle = baselines::exhaustive_oracle(
            set, powers, params.noise_power, 2, 8);
        CHECK(result.rate >= 0.9 * oracle.rate);

        // snapping the continuous phases to the oracle grid cannot beat it
        PhaseShiftVector snapped = result.theta;
        for (int i = 0; i < snapped.size(); ++i) {
            const double level =
                std::round(snapped.theta[i] / (2.0 * M_PI / 8.0));
            snapped.theta[i] = wrap_angle(level * 2.0 * M_PI / 8.0);
        }
        const double snapped_rate = evaluate_rate(
            set, result.ports, snapped, powers, params.noise_power);
        CHECK(oracle.rate >= snapped_rate - 1e-9);
    }
}
