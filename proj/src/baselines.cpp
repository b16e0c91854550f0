#include "fasris/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fasris::baselines {

namespace {

double now_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

PhaseShiftVector draw_phases(int n, Rng& rng) {
    PhaseShiftVector theta;
    theta.theta.resize(n);
    for (int i = 0; i < n; ++i) theta.theta[i] = rng.uniform(0.0, 2.0 * M_PI);
    return theta;
}

PortSelection draw_ports(int active, int num_ports, Rng& rng) {
    // sample `active` distinct indices, then sort
    std::vector<int> pool(num_ports);
    for (int i = 0; i < num_ports; ++i) pool[i] = i + 1;
    for (int i = 0; i < active; ++i) {
        const int j = i + static_cast<int>(rng.below(num_ports - i));
        std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + active);
    PortSelection ports;
    ports.integer_mode = true;
    ports.r.resize(active);
    for (int i = 0; i < active; ++i) ports.r[i] = pool[i];
    return ports;
}

}  // namespace

PortSelection half_wavelength_ports(const PortLayout& layout, int n_active) {
    const double spacing = layout.spacing();
    if (spacing <= 0.0)
        throw ConfigError("half_wavelength_ports: degenerate aperture");
    // half-wavelength pitch measured in ports
    const double pitch = (layout.wavelength / 2.0) / spacing;
    if ((n_active - 1) * pitch > layout.num_ports - 1 + 1e-9)
        throw ConfigError(
            "half_wavelength_ports: aperture too small for " +
            std::to_string(n_active) + " half-wavelength-spaced positions");
    const double center = (layout.num_ports + 1) / 2.0;
    std::vector<long> chosen;
    for (int i = 0; i < n_active; ++i) {
        const double target = center + (i - (n_active - 1) / 2.0) * pitch;
        long port = std::lround(target);
        port = std::clamp<long>(port, 1, layout.num_ports);
        if (!chosen.empty()) port = std::max(port, chosen.back() + 1);
        if (port > layout.num_ports)
            throw ConfigError(
                "half_wavelength_ports: aperture too small for the fixed array");
        chosen.push_back(port);
    }
    PortSelection ports;
    ports.integer_mode = true;
    ports.r.resize(n_active);
    for (int i = 0; i < n_active; ++i) ports.r[i] = chosen[i];
    return ports;
}

ChannelSet without_ris(const ChannelSet& channels) {
    ChannelSet out = channels;
    out.n_ris = 0;
    out.ris_link.tx_projected.resize(out.ris_link.tx_projected.rows(), 0);
    out.g_bs.resize(0, channels.n_tx);
    for (auto& g : out.g_k) g.resize(0, channels.n_tx);
    return out;
}

SchemeResult random_fas_ris(const ChannelSet& channels,
                            const TransmitPowers& powers, double noise_power,
                            int active_ports, std::uint64_t seed, int draws) {
    const auto start = std::chrono::steady_clock::now();
    SchemeResult result;
    result.scheme = "random";
    double rate_sum = 0.0;
    for (int d = 0; d < draws; ++d) {
        Rng port_rng(substream(seed, d, 1));
        Rng phase_rng(substream(seed, d, 2));
        const PortSelection ports =
            draw_ports(active_ports, channels.layout.num_ports, port_rng);
        const PhaseShiftVector theta = draw_phases(channels.n_ris, phase_rng);
        const double rate =
            evaluate_rate(channels, ports, theta, powers, noise_power);
        rate_sum += rate;
        if (d == 0) {
            result.theta = theta;
            result.ports = ports;
        }
    }
    result.rate = rate_sum / draws;
    result.sinr = std::exp2(result.rate) - 1.0;
    result.seconds = now_seconds(start);
    return result;
}

SchemeResult fpa_baseline(const ChannelSet& channels,
                          const TransmitPowers& powers, double noise_power,
                          std::uint64_t seed, int draws) {
    const auto start = std::chrono::steady_clock::now();
    SchemeResult result;
    result.scheme = "fpa";
    result.ports = half_wavelength_ports(channels.layout, 4);
    double rate_sum = 0.0;
    for (int d = 0; d < draws; ++d) {
        Rng phase_rng(substream(seed, d, 2));
        const PhaseShiftVector theta = draw_phases(channels.n_ris, phase_rng);
        rate_sum +=
            evaluate_rate(channels, result.ports, theta, powers, noise_power);
        if (d == 0) result.theta = theta;
    }
    result.rate = rate_sum / draws;
    result.sinr = std::exp2(result.rate) - 1.0;
    result.seconds = now_seconds(start);
    return result;
}

SchemeResult traditional_as(const ChannelSet& channels,
                            const TransmitPowers& powers,
                            const sca::SCAParams& params, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    sca::SCAParams fixed = params;
    fixed.optimize_ports = false;
    Rng phase_rng(substream(seed, 0, 2));
    sca::SCAInit init;
    init.theta0 = draw_phases(channels.n_ris, phase_rng);
    init.r0 = half_wavelength_ports(channels.layout, 4);
    init.r0.integer_mode = false;
    const sca::SCAResult run = sca::run_sca(channels, powers, fixed, init);
    SchemeResult result;
    result.scheme = "traditional_as";
    result.rate = run.rate;
    result.sinr = std::exp2(run.rate) - 1.0;
    result.theta = run.theta;
    result.ports = run.ports;
    result.iterations = run.iterations;
    result.seconds = now_seconds(start);
    return result;
}

SchemeResult fas_without_ris(const ChannelSet& channels,
                             const TransmitPowers& powers,
                             const sca::SCAParams& params, int active_ports,
                             const sca::SCAInit* start) {
    const auto t0 = std::chrono::steady_clock::now();
    const ChannelSet stripped = without_ris(channels);
    sca::SCAInit init;
    if (start != nullptr) {
        init = *start;
        init.theta0.theta.resize(0);
    } else {
        init.theta0.theta.resize(0);
        init.r0 = spread_ports(active_ports, channels.layout.num_ports);
    }
    const sca::SCAResult run = sca::run_sca(stripped, powers, params, init);
    SchemeResult result;
    result.scheme = "fas_wo_ris";
    result.rate = run.rate;
    result.sinr = std::exp2(run.rate) - 1.0;
    result.theta = run.theta;
    result.ports = run.ports;
    result.iterations = run.iterations;
    result.seconds = now_seconds(t0);
    return result;
}

SchemeResult proposed(const ChannelSet& channels, const TransmitPowers& powers,
                      const sca::SCAParams& params, int active_ports,
                      std::uint64_t seed,
                      const std::vector<sca::SCAInit>& extra_starts) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng phase_rng(substream(seed, 0, 2));
    sca::SCAInit init;
    init.theta0 = draw_phases(channels.n_ris, phase_rng);
    init.r0 = spread_ports(active_ports, channels.layout.num_ports);

    SchemeResult result;
    result.scheme = "proposed";
    result.rate = -1.0;
    auto consider = [&](const sca::SCAInit& candidate) {
        const sca::SCAResult run = sca::run_sca(channels, powers, params, candidate);
        if (run.rate > result.rate) {
            result.rate = run.rate;
            result.theta = run.theta;
            result.ports = run.ports;
            result.iterations = run.iterations;
        }
    };
    consider(init);
    for (const auto& extra : extra_starts) consider(extra);
    result.sinr = std::exp2(result.rate) - 1.0;
    result.seconds = now_seconds(t0);
    return result;
}

SchemeResult exhaustive_oracle(const ChannelSet& channels,
                               const TransmitPowers& powers,
                               double noise_power, int active_ports,
                               int phase_levels, std::uint64_t budget) {
    const auto t0 = std::chrono::steady_clock::now();
    if (phase_levels < 1)
        throw std::domain_error("exhaustive_oracle: phase levels must be >= 1");
    const int m = channels.layout.num_ports;
    const int ml = active_ports;
    const int n = channels.n_ris;

    // evaluation budget: C(M, m_l) * Q^N
    double combos = 1.0;
    for (int i = 0; i < ml; ++i) combos = combos * (m - i) / (i + 1);
    double grid = std::pow(static_cast<double>(phase_levels), n);
    const double total = combos * grid;
    if (total > static_cast<double>(budget))
        throw ConfigError("exhaustive_oracle: " + std::to_string(total) +
                          " evaluations exceed budget " + std::to_string(budget));

    SchemeResult best;
    best.scheme = "oracle";
    best.rate = -1.0;
    long evaluations = 0;

    std::vector<int> combo(ml);
    for (int i = 0; i < ml; ++i) combo[i] = i + 1;
    Eigen::VectorXd ports_vec(ml);
    std::vector<double> grid_phase(phase_levels);
    for (int q = 0; q < phase_levels; ++q)
        grid_phase[q] = 2.0 * M_PI * q / phase_levels;

    while (true) {
        for (int i = 0; i < ml; ++i) ports_vec[i] = combo[i];
        const Channels mats = channels.materialize(ports_vec);
        // signal and interference as affine functions of the unit weights
        const Eigen::VectorXcd s_dir = mats.h_bs * powers.p_bs;
        Eigen::MatrixXcd s_mat(ml, std::max(n, 1));
        if (n > 0)
            s_mat = mats.h_d.adjoint() *
                    (mats.g_bs * powers.p_bs).asDiagonal();
        std::vector<Eigen::VectorXcd> i_dir;
        std::vector<Eigen::MatrixXcd> i_mat;
        for (std::size_t k = 0; k < mats.h_k.size(); ++k) {
            i_dir.push_back(mats.h_k[k] * powers.p_k[k]);
            if (n > 0)
                i_mat.push_back(mats.h_d.adjoint() *
                                (mats.g_k[k] * powers.p_k[k]).asDiagonal());
        }

        std::vector<int> levels(std::max(n, 1), 0);
        Eigen::VectorXcd v(n);
        while (true) {
            for (int i = 0; i < n; ++i) v[i] = std::polar(1.0, grid_phase[levels[i]]);
            Eigen::VectorXcd s = s_dir;
            if (n > 0) s += s_mat * v;
            double denom = ml * noise_power;
            for (std::size_t k = 0; k < i_dir.size(); ++k) {
                Eigen::VectorXcd sk = i_dir[k];
                if (n > 0) sk += i_mat[k] * v;
                denom += sk.squaredNorm();
            }
            const double rate = std::log2(1.0 + s.squaredNorm() / denom);
            ++evaluations;
            if (rate > best.rate) {
                best.rate = rate;
                best.ports.integer_mode = true;
                best.ports.r = ports_vec;
                best.theta.theta.resize(n);
                for (int i = 0; i < n; ++i)
                    best.theta.theta[i] = grid_phase[levels[i]];
            }
            // advance the phase grid odometer
            if (n == 0) break;
            int digit = n - 1;
            while (digit >= 0 && ++levels[digit] == phase_levels)
                levels[digit--] = 0;
            if (digit < 0) break;
        }

        // next port combination
        int pos = ml - 1;
        while (pos >= 0 && combo[pos] == m - (ml - 1 - pos)) --pos;
        if (pos < 0) break;
        ++combo[pos];
        for (int i = pos + 1; i < ml; ++i) combo[i] = combo[i - 1] + 1;
    }

    best.sinr = std::exp2(best.rate) - 1.0;
    best.evaluations = evaluations;
    best.seconds = now_seconds(t0);
    return best;
}

}  // namespace fasris::baselines
