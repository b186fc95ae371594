#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "inharmonica/model.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/types.hpp"

namespace testutil {

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

// Bell-shaped amplitude profile used by the reference configuration.
inline std::vector<double> bell_amplitudes(std::size_t k_count) {
  std::vector<double> amps(k_count);
  for (std::size_t k = 1; k <= k_count; ++k) {
    const double d = static_cast<double>(k) - static_cast<double>(k_count) / 2.0;
    amps[k - 1] = std::exp(-d * d / 20.0);
  }
  return amps;
}

inline std::vector<double> draw_phases(std::size_t k_count,
                                       std::uint64_t seed) {
  inharmonica::Rng rng(seed);
  std::vector<double> phases(k_count);
  for (double& p : phases) p = rng.uniform_angle();
  return phases;
}

inline double noise_variance_for_snr(const std::vector<double>& amplitudes,
                                     double snr_db) {
  double power = 0.0;
  for (double r : amplitudes) power += r * r;
  return power / std::pow(10.0, snr_db / 10.0);
}

// The reference configuration: K=10, omega=pi/40, bell amplitudes, phases
// drawn once from seed 42, stiffness-type inharmonicity.
inline inharmonica::TrueSignalSpec reference_spec(double beta, double snr_db,
                                                  std::size_t k_count = 10,
                                                  std::uint64_t phase_seed = 42) {
  const double omega = 0.07853981633974483;
  const auto amps = bell_amplitudes(k_count);
  const auto phases = draw_phases(k_count, phase_seed);
  const auto freqs = inharmonica::frequencies_from_law(
      inharmonica::StiffnessLaw{omega, beta}, k_count);
  return inharmonica::TrueSignalSpec(amps, phases, freqs,
                                     noise_variance_for_snr(amps, snr_db));
}

}  // namespace testutil
