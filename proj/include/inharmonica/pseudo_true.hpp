#pragma once

#include <Eigen/Dense>

#include "inharmonica/types.hpp"

namespace inharmonica {

// Controls the fundamental-frequency search shared by the pseudo-true solver
// and the harmonic maximum-likelihood estimator.
struct SearchConfig {
  // Explicit window (rad/sample); used when window_hi > window_lo > 0.
  double window_lo = 0.0;
  double window_hi = 0.0;
  // When no explicit window is set, a positive hint narrows the default
  // window (0, 2*pi/K) to [hint/2, min(2*pi/K, 1.5*hint)].
  double omega_hint = 0.0;
  // Grid candidates across the window; 0 means 8 * n_samples.
  std::size_t grid_points = 0;
  // Golden-section refinement stops at this bracket width (rad/sample).
  // Tight by default so downstream ratios are stable to ulp-level input
  // perturbations; the grid stage dominates the cost either way.
  double refine_tolerance = 1e-13;
  std::size_t max_refine_iterations = 200;
};

struct PseudoTrueResult {
  HarmonicParams params;
  double pseudo_variance = 0.0;   // noise variance plus per-sample mismatch
  double residual_energy = 0.0;   // ||x - model||^2 over the window
  bool converged = false;
  std::size_t iterations = 0;     // refinement steps taken
};

// Harmonic waveform at theta minus the noise-free true waveform, t = 0..N-1.
ComplexSeries waveform_diff(const HarmonicParams& theta,
                            const TrueSignalSpec& spec, std::size_t n_samples);

// sigma^2(theta) = noise variance + ||waveform_diff||^2 / N.
double pseudo_variance(const TrueSignalSpec& spec, const HarmonicParams& theta,
                       std::size_t n_samples);

// Least-squares-closest harmonic parameter point to the noise-free waveform of
// `spec` over a window of n_samples: dense grid scan over omega followed by
// golden-section refinement, complex amplitudes concentrated out per candidate.
// The default omega hint is the first partial of `spec`.
PseudoTrueResult solve_pseudo_true(const TrueSignalSpec& spec,
                                   std::size_t n_samples,
                                   const SearchConfig& search = {});

namespace detail {

// The shared nonlinear-least-squares path: fit a K-harmonic model to an
// arbitrary series. solve_pseudo_true feeds the noise-free waveform through
// this; the harmonic MLE feeds noisy data.
struct HarmonicFit {
  double omega = 0.0;
  Eigen::VectorXcd amplitudes;
  double residual_energy = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

HarmonicFit fit_harmonic_series(const ComplexSeries& series,
                                std::size_t k_count,
                                const SearchConfig& search);

HarmonicParams params_from_fit(const HarmonicFit& fit);

}  // namespace detail

}  // namespace inharmonica
