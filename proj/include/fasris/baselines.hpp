#ifndef FASRIS_BASELINES_HPP
#define FASRIS_BASELINES_HPP

#include <cstdint>
#include <string>

#include "fasris/sca.hpp"

namespace fasris::baselines {

struct SchemeResult {
    std::string scheme;
    double rate = 0.0;  // bps/Hz (mean over draws for randomized schemes)
    double sinr = 0.0;  // 2^rate - 1
    PhaseShiftVector theta;
    PortSelection ports;
    int iterations = 0;
    double seconds = 0.0;
    long evaluations = 0;  // design points examined (oracle)
};

// n_active ports spaced half a wavelength, centered in the aperture,
// snapped to the nearest distinct ports
PortSelection half_wavelength_ports(const PortLayout& layout, int n_active = 4);

// strips the reflecting surface from a realization (N = 0)
ChannelSet without_ris(const ChannelSet& channels);

// Randomized schemes draw `draws` paired (port, phase) samples from seeded
// substreams and report the mean rate. Draw i of every scheme shares the
// same phase substream, which keeps cross-scheme comparisons paired.
SchemeResult random_fas_ris(const ChannelSet& channels,
                            const TransmitPowers& powers, double noise_power,
                            int active_ports, std::uint64_t seed,
                            int draws = 100);

SchemeResult fpa_baseline(const ChannelSet& channels,
                          const TransmitPowers& powers, double noise_power,
                          std::uint64_t seed, int draws = 100);

// fixed half-wavelength ports, surface phases optimized
SchemeResult traditional_as(const ChannelSet& channels,
                            const TransmitPowers& powers,
                            const sca::SCAParams& params, std::uint64_t seed);

// ports optimized with the surface removed
SchemeResult fas_without_ris(const ChannelSet& channels,
                             const TransmitPowers& powers,
                             const sca::SCAParams& params, int active_ports,
                             const sca::SCAInit* start = nullptr);

// joint optimization; runs the default start plus any extra starts and keeps
// the best design
SchemeResult proposed(const ChannelSet& channels, const TransmitPowers& powers,
                      const sca::SCAParams& params, int active_ports,
                      std::uint64_t seed,
                      const std::vector<sca::SCAInit>& extra_starts = {});

// Exact discrete optimum over all ordered port subsets and the uniform phase
// grid {2*pi*q/Q}. Refuses when the evaluation count exceeds the budget.
SchemeResult exhaustive_oracle(const ChannelSet& channels,
                               const TransmitPowers& powers,
                               double noise_power, int active_ports,
                               int phase_levels,
                               std::uint64_t budget = 10'000'000);

}  // namespace fasris::baselines

#endif
