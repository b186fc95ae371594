#pragma once

#include <cstdint>

#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/types.hpp"

namespace inharmonica {

struct HarmonicEstimate {
  HarmonicParams params;
  double residual_variance = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Maximum-likelihood fit of a K-harmonic model to noisy data: same grid plus
// golden-section search as the pseudo-true solver, applied to the observed
// series instead of the noise-free waveform.
HarmonicEstimate harmonic_mle(const ComplexSeries& series, std::size_t k_count,
                              const SearchConfig& search = {});

// A set of K unconstrained sinusoids, ascending in frequency.
struct SinusoidSet {
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::vector<double> frequencies;
};

struct UnstructuredEstimate {
  SinusoidSet params;
  double residual_variance = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
};

struct UnstructuredOptions {
  // Half-width of each per-frequency line search, rad/sample; 0 picks
  // 3*pi/n automatically (a few DFT bins around the initial value).
  double search_halfwidth = 0.0;
  double relative_tolerance = 1e-12;
  // Per-coordinate golden-section bracket width (rad/sample).
  double frequency_tolerance = 1e-13;
  std::size_t max_sweeps = 60;
};

// Maximum-likelihood fit of K free sinusoids by cyclic minimization over one
// frequency at a time with all complex amplitudes re-solved jointly per
// candidate. Initial frequencies must be distinct and ascending. Fits whose
// frequencies collide closer than pi/(4N) are flagged not converged.
UnstructuredEstimate unstructured_mle(const ComplexSeries& series,
                                      const std::vector<double>& initial_freqs,
                                      const UnstructuredOptions& options = {});

struct ConsistencyRow {
  std::size_t n_samples = 0;
  double omega0 = 0.0;
  double mean_estimate = 0.0;
  double mean_abs_gap = 0.0;     // |mean(omega_hat) - omega0|
  double standard_error = 0.0;   // std(omega_hat) / sqrt(trials)
  std::size_t n_converged = 0;
};

// Monte Carlo check that the harmonic MLE concentrates on the pseudo-true
// omega as N grows: for each N, runs `trials` noisy fits against the fixed
// spec and reports the gap between the estimator mean and omega0(N).
std::vector<ConsistencyRow> asymptotic_mle_consistency_check(
    const TrueSignalSpec& spec, const std::vector<std::size_t>& n_values,
    std::size_t trials, std::uint64_t seed, const SearchConfig& search = {});

}  // namespace inharmonica
