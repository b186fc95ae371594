#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/types.hpp"

namespace inharmonica {

// Which configuration knob a sweep varies. Serialized as "beta", "n", "snr_db".
enum class SweepAxis { Inharmonicity, SampleCount, Snr };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepConfig {
  SweepAxis axis = SweepAxis::Inharmonicity;
  std::vector<double> axis_values;
  // Held fixed unless the axis varies them.
  double beta = 1e-4;
  std::size_t n_samples = 200;
  double snr_db = 10.0;
  std::size_t trials = 1000;
  std::size_t harmonic_count = 10;
  double omega = 0.07853981633974483;  // pi/40
  // Empty selects the bell profile exp(-(k - K/2)^2 / 20).
  std::vector<double> amplitudes;
  // Default protocol redraws phases per trial and averages the bound curves
  // over bound_phase_draws independent draws; fixed mode draws once per axis
  // value and shares that draw between trials and bounds.
  bool redraw_phases = true;
  std::size_t bound_phase_draws = 50;
  bool run_unstructured = false;
  std::uint64_t seed = 1;
  std::size_t max_threads = 0;
  SearchConfig search;
};

struct SweepCell {
  double axis_value = 0.0;
  // Empirical statistics of the first-partial frequency estimate
  // (1 * omega_hat for the harmonic model), over converged trials.
  double mse_empirical = 0.0;
  double var_empirical = 0.0;
  double bias_sq = 0.0;
  std::size_t n_converged = 0;
  // Bound curve values (phase-averaged under the redraw protocol).
  double mse_lb = 0.0;
  double mcrlb_exact = 0.0;
  double mcrlb_asymp = 0.0;
  double crlb_sine = 0.0;
  double crlb_harmonic = 0.0;
  // Unstructured estimator statistics, populated when enabled.
  double mse_unstructured = 0.0;
  double var_unstructured = 0.0;
  double bias_sq_unstructured = 0.0;
  std::size_t n_converged_unstructured = 0;
  // Nonempty when the bound computation failed; bound fields are NaN then.
  std::string bound_error;
};

struct SweepResult {
  SweepConfig config;
  std::vector<double> amplitudes;  // resolved profile
  std::vector<SweepCell> cells;
};

std::vector<double> default_amplitude_profile(std::size_t k_count);

// Runs the full sweep: per axis value, bound curves plus `trials` Monte Carlo
// estimator runs with per-trial derived seeds. Deterministic for a given
// config and seed regardless of thread count.
SweepResult run_sweep(const SweepConfig& config);

// Writes the figure CSV; with the unstructured estimator enabled a sibling
// `<stem>_unstructured.csv` carries its statistics in the same layout.
void emit_figure_data(const SweepResult& result,
                      const std::filesystem::path& csv_path);

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep_config_to_json(const SweepConfig& config);

}  // namespace inharmonica
