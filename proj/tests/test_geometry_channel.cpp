#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fasris/channel.hpp"
#include "fasris/geometry.hpp"

using namespace fasris;

namespace {

// layout with unit port spacing: W*lambda/(M-1) = 1
PortLayout unit_spacing_layout(int m) {
    return PortLayout(m, static_cast<double>(m - 1), 1.0);
}

PathAngles make_angles(std::initializer_list<double> elevation,
                       std::initializer_list<double> azimuth) {
    PathAngles angles;
    angles.elevation.resize(static_cast<int>(elevation.size()));
    angles.azimuth.resize(static_cast<int>(azimuth.size()));
    int i = 0;
    for (double e : elevation) angles.elevation[i++] = e;
    i = 0;
    for (double a : azimuth) angles.azimuth[i++] = a;
    return angles;
}

PathAngles random_angles(int count, Rng& rng) {
    PathAngles angles;
    angles.elevation.resize(count);
    angles.azimuth.resize(count);
    for (int i = 0; i < count; ++i) {
        angles.elevation[i] = rng.uniform(0.0, M_PI);
        angles.azimuth[i] = rng.uniform(0.0, 2.0 * M_PI);
    }
    return angles;
}

}  // namespace

TEST_CASE("port coordinates follow the centered index formula") {
    CHECK(port_coordinate(1, PortLayout(1, 1.0, 0.1)) == doctest::Approx(0.0));
    const PortLayout layout = unit_spacing_layout(20);
    CHECK(port_coordinate(10, layout) == doctest::Approx(-0.5));
    CHECK(port_coordinate(20, layout) == doctest::Approx(9.5));
    CHECK(port_coordinate(1, layout) == doctest::Approx(-9.5));
    CHECK_THROWS_AS(port_coordinate(0.5, layout), std::domain_error);
    CHECK_THROWS_AS(port_coordinate(21.0, layout), std::domain_error);
}

TEST_CASE("field response phases") {
    const PathAngles angles = make_angles({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});

    SUBCASE("origin gives the all-ones vector") {
        const Eigen::VectorXcd v =
            field_response(Eigen::Vector2d(0, 0), angles, 0.06);
        for (int i = 0; i < v.size(); ++i)
            CHECK(std::abs(v[i] - std::complex<double>(1, 0)) < 1e-12);
    }
    SUBCASE("half-wavelength axial offset flips the sign") {
        const double lambda = 0.06;
        const PathAngles single = make_angles({0.0}, {0.0});
        const Eigen::VectorXcd v =
            field_response(Eigen::Vector2d(0.0, lambda / 2.0), single, lambda);
        CHECK(std::abs(v[0] - std::complex<double>(-1, 0)) < 1e-12);
    }
    SUBCASE("entries always have unit modulus") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const PathAngles a = random_angles(4, rng);
            const Eigen::Vector2d pos(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const Eigen::VectorXcd v = field_response(pos, a, 0.06);
            for (int i = 0; i < v.size(); ++i)
                CHECK(std::abs(std::abs(v[i]) - 1.0) < 1e-12);
        }
    }
    SUBCASE("non-positive wavelength is rejected") {
        CHECK_THROWS_AS(field_response(Eigen::Vector2d(0, 0), angles, 0.0),
                        std::domain_error);
    }
}

TEST_CASE("receive field matrix stacks per-port responses") {
    const PortLayout layout(5, 2.0, 0.06);
    Rng rng(3);
    const PathAngles angles = random_angles(3, rng);

    SUBCASE("centered port of an odd array is the origin") {
        Eigen::VectorXd ports(1);
        ports << 3.0;
        const Eigen::MatrixXcd f = receive_field_matrix(ports, angles, layout);
        REQUIRE(f.rows() == 3);
        REQUIRE(f.cols() == 1);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(f(i, 0) - std::complex<double>(1, 0)) < 1e-12);
    }
    SUBCASE("identical ports give identical columns") {
        Eigen::VectorXd ports(2);
        ports << 2.0, 2.0;
        const Eigen::MatrixXcd f = receive_field_matrix(ports, angles, layout);
        CHECK((f.col(0) - f.col(1)).norm() == doctest::Approx(0.0));
    }
    SUBCASE("columns match the single-port oracle") {
        const PortLayout wide(20, 3.0, 0.06);
        Eigen::VectorXd ports(4);
        ports << 1.0, 6.5, 13.0, 20.0;
        const Eigen::MatrixXcd f = receive_field_matrix(ports, angles, wide);
        for (int m = 0; m < 4; ++m) {
            const Eigen::Vector2d pos(0.0, port_coordinate(ports[m], wide));
            const Eigen::VectorXcd col =
                field_response(pos, angles, wide.wavelength);
            CHECK((f.col(m) - col).norm() < 1e-14);
        }
    }
    SUBCASE("empty port list is rejected") {
        CHECK_THROWS_AS(receive_field_matrix(Eigen::VectorXd(), angles, layout),
                        std::domain_error);
    }
}

TEST_CASE("transmit field matrix") {
    Rng rng(11);
    const PathAngles angles = random_angles(3, rng);
    const double lambda = 0.06;

    SUBCASE("single element at the origin") {
        const Eigen::MatrixXcd t = transmit_field_matrix(
            {Eigen::Vector2d(0, 0)}, angles, lambda);
        for (int i = 0; i < t.rows(); ++i)
            CHECK(std::abs(t(i, 0) - std::complex<double>(1, 0)) < 1e-12);
    }
    SUBCASE("line array matches the per-element oracle") {
        const auto array = uniform_line_array(4, lambda);
        const Eigen::MatrixXcd t = transmit_field_matrix(array, angles, lambda);
        REQUIRE(t.cols() == 4);
        for (int n = 0; n < 4; ++n) {
            const Eigen::VectorXcd col = field_response(array[n], angles, lambda);
            CHECK((t.col(n) - col).norm() < 1e-14);
        }
        for (int i = 0; i < t.size(); ++i)
            CHECK(std::abs(std::abs(t.data()[i]) - 1.0) < 1e-12);
    }
}

TEST_CASE("path response sampling") {
    SUBCASE("pure line-of-sight limit keeps only the first entry") {
        Rng rng(5);
        const Eigen::MatrixXcd psi = sample_path_response(
            3, 3, std::numeric_limits<double>::infinity(), 0.25, rng);
        CHECK(std::abs(psi(0, 0) - std::sqrt(0.25)) < 1e-12);
        CHECK(psi.cwiseAbs().sum() == doctest::Approx(std::sqrt(0.25)));
    }
    SUBCASE("scatter-only limit zeroes the deterministic entry") {
        Rng rng(5);
        const Eigen::MatrixXcd psi = sample_path_response(3, 3, 0.0, 1.0, rng);
        CHECK(std::abs(psi(0, 0)) == doctest::Approx(0.0));
        CHECK(std::abs(psi(1, 1)) > 0.0);
        CHECK(std::abs(psi(2, 2)) > 0.0);
        CHECK(std::abs(psi(0, 1)) == doctest::Approx(0.0));
    }
    SUBCASE("mean squared Frobenius norm matches the link gain") {
        Rng rng(17);
        const double gain = 3.7e-7;
        double total = 0.0;
        const int samples = 10000;
        for (int i = 0; i < samples; ++i)
            total += sample_path_response(3, 3, 1.0, gain, rng).squaredNorm();
        CHECK(total / samples == doctest::Approx(gain).epsilon(0.03));
    }
    SUBCASE("invalid arguments") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_path_response(0, 3, 1.0, 1.0, rng),
                        std::domain_error);
        CHECK_THROWS_AS(sample_path_response(3, 3, 1.0, 0.0, rng),
                        std::domain_error);
        CHECK_THROWS_AS(sample_path_response(3, 3, -1.0, 1.0, rng),
                        std::domain_error);
    }
}

TEST_CASE("channel synthesis") {
    Rng rng(23);
    SUBCASE("zero path response gives a zero channel") {
        const Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(3, 4);
        const Eigen::MatrixXcd lam = Eigen::MatrixXcd::Random(3, 2);
        const Eigen::MatrixXcd z =
            synthesize_channel(f, Eigen::MatrixXcd::Zero(3, 3), lam);
        CHECK(z.norm() == doctest::Approx(0.0));
    }
    SUBCASE("all-ones responses with identity coupling") {
        const Eigen::MatrixXcd f = Eigen::MatrixXcd::Ones(3, 4);
        const Eigen::MatrixXcd lam = Eigen::MatrixXcd::Ones(3, 2);
        const Eigen::MatrixXcd z =
            synthesize_channel(f, Eigen::MatrixXcd::Identity(3, 3), lam);
        for (int i = 0; i < z.size(); ++i)
            CHECK(std::abs(z.data()[i] - std::complex<double>(3, 0)) < 1e-12);
    }
    SUBCASE("matches an explicit triple-product oracle") {
        const Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(3, 4);
        const Eigen::MatrixXcd psi = Eigen::MatrixXcd::Random(3, 2);
        const Eigen::MatrixXcd lam = Eigen::MatrixXcd::Random(2, 5);
        const Eigen::MatrixXcd z = synthesize_channel(f, psi, lam);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 5; ++c) {
                std::complex<double> expect(0, 0);
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 2; ++k)
                        expect += std::conj(f(i, r)) * psi(i, k) * lam(k, c);
                CHECK(std::abs(z(r, c) - expect) < 1e-12);
            }
    }
    SUBCASE("linearity in the path response") {
        const Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(3, 4);
        const Eigen::MatrixXcd p1 = Eigen::MatrixXcd::Random(3, 3);
        const Eigen::MatrixXcd p2 = Eigen::MatrixXcd::Random(3, 3);
        const Eigen::MatrixXcd lam = Eigen::MatrixXcd::Random(3, 2);
        const std::complex<double> a(0.7, -0.3), b(-1.1, 0.2);
        const Eigen::MatrixXcd lhs = synthesize_channel(f, a * p1 + b * p2, lam);
        const Eigen::MatrixXcd rhs =
            a * synthesize_channel(f, p1, lam) + b * synthesize_channel(f, p2, lam);
        CHECK((lhs - rhs).norm() < 1e-10);
    }
    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(
            synthesize_channel(Eigen::MatrixXcd::Ones(3, 4),
                               Eigen::MatrixXcd::Ones(2, 3),
                               Eigen::MatrixXcd::Ones(3, 2)),
            std::invalid_argument);
    }
}

TEST_CASE("distance power law") {
    CHECK(path_loss(1.0, 1e-3, 2.0) == doctest::Approx(1e-3));
    CHECK(path_loss(10.0, 1e-3, 2.0) == doctest::Approx(1e-5));
    CHECK(path_loss(5.0, 1e-3, 2.0) > path_loss(50.0, 1e-3, 2.0));
    CHECK_THROWS_AS(path_loss(0.0, 1e-3, 2.0), std::domain_error);
}

TEST_CASE("scenario sampling") {
    ScenarioConfig config;  // reference defaults

    SUBCASE("identical seeds give bit-identical channels") {
        Rng rng_a(42), rng_b(42);
        const ChannelSet a = sample_scenario(config, rng_a);
        const ChannelSet b = sample_scenario(config, rng_b);
        CHECK(a.bs_link.tx_projected == b.bs_link.tx_projected);
        CHECK(a.g_bs == b.g_bs);
        REQUIRE(a.interferer_links.size() == b.interferer_links.size());
        for (std::size_t k = 0; k < a.interferer_links.size(); ++k)
            CHECK(a.interferer_links[k].tx_projected ==
                  b.interferer_links[k].tx_projected);
        Rng rng_c(43);
        const ChannelSet c = sample_scenario(config, rng_c);
        CHECK(a.bs_link.tx_projected != c.bs_link.tx_projected);
    }
    SUBCASE("no interferers means empty lists") {
        ScenarioConfig quiet = config;
        quiet.n_interferers = 0;
        Rng rng(1);
        const ChannelSet set = sample_scenario(quiet, rng);
        CHECK(set.interferer_links.empty());
        CHECK(set.g_k.empty());
    }
    SUBCASE("reference configuration has the expected shapes") {
        Rng rng(9);
        const ChannelSet set = sample_scenario(config, rng);
        Eigen::VectorXd ports(4);
        ports << 1, 7, 13, 20;
        const Channels mats = set.materialize(ports);
        CHECK(mats.h_bs.rows() == 4);
        CHECK(mats.h_bs.cols() == 4);
        CHECK(mats.h_k.size() == 6);
        CHECK(mats.h_d.rows() == 100);
        CHECK(mats.h_d.cols() == 4);
        CHECK(mats.g_bs.rows() == 100);
        CHECK(mats.g_bs.cols() == 4);
        CHECK(mats.g_k.size() == 6);
    }
    SUBCASE("active ports above the port count are rejected") {
        ScenarioConfig bad = config;
        bad.active_ports = 30;
        Rng rng(1);
        CHECK_THROWS_AS(sample_scenario(bad, rng), ConfigError);
    }
    SUBCASE("moving a port changes phases but not magnitudes") {
        Rng rng(4);
        const ChannelSet set = sample_scenario(config, rng);
        Eigen::VectorXd a(1), b(1);
        a << 3.0;
        b << 17.0;
        const Eigen::MatrixXcd fa =
            receive_field_matrix(a, set.bs_link.rx_angles, set.layout);
        const Eigen::MatrixXcd fb =
            receive_field_matrix(b, set.bs_link.rx_angles, set.layout);
        CHECK((fa.cwiseAbs() - fb.cwiseAbs()).norm() < 1e-12);
    }
}
