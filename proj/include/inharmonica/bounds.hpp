#pragma once

#include <Eigen/Dense>

#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/types.hpp"

namespace inharmonica {

// The three matrices of the sandwich variance expression, evaluated at a
// harmonic parameter point theta against a true signal spec:
//   score_info          F = (2 sb2 / s2^2) sum_t Re[conj(grad) grad^T]
//   mismatch_curvature  (2 / s2) sum_t Re[conj(eps_t) hess_t]
//   expected_hessian    A = -(s2 / sb2) F - mismatch_curvature
// with eps the model-minus-truth waveform difference, sb2 the noise variance
// and s2 the pseudo variance at theta.
struct SandwichMatrices {
  Eigen::MatrixXd score_info;
  Eigen::MatrixXd mismatch_curvature;
  Eigen::MatrixXd expected_hessian;
  double noise_variance = 0.0;
  double pseudo_variance = 0.0;
};

SandwichMatrices build_sandwich(const HarmonicParams& theta,
                                const TrueSignalSpec& spec,
                                std::size_t n_samples);

// Diagonal of A^-1 F A^-1: the asymptotic covariance of the misspecified
// maximum-likelihood estimator, exact finite-N matrices. Entry 0 is omega.
// Throws NumericalError when A is singular or has condition above 1e12.
Eigen::VectorXd mcrlb_exact(const SandwichMatrices& matrices);

// Exact CRLB for the harmonic model itself (inverse Fisher information at
// theta with noise variance sb2); the reference when the model is correct.
Eigen::VectorXd crlb_harmonic(const HarmonicParams& theta,
                              double noise_variance, std::size_t n_samples);

// Closed-form large-N decomposition of the omega sandwich bound. The terms:
//   curvature          C: concentrated criterion curvature, harmonic part
//   mismatch_hessian   Z: second-derivative coupling to the waveform mismatch
//   mismatch_cross     D: cross term between template and mismatch scores
//   mismatch_score     E: concentrated mismatch score energy
// Bound value: sb2 (C + E) / (C - E + Z + D)^2.
struct AsymptoticTerms {
  double curvature = 0.0;
  double mismatch_hessian = 0.0;
  double mismatch_cross = 0.0;
  double mismatch_score = 0.0;
  std::vector<double> phase_offsets;  // model phase minus true phase, per k
  std::vector<double> freq_offsets;   // k*omega minus true partial, per k
};

struct AsymptoticBound {
  double value = 0.0;
  AsymptoticTerms terms;
};

AsymptoticBound mcrlb_asymptotic(const HarmonicParams& theta,
                                 const TrueSignalSpec& spec,
                                 std::size_t n_samples);

// Finite-N route to the same decomposition through the arrowhead structure of
// the concentrated problem: eta (omega-omega sums), z (omega-nuisance sums),
// d (nuisance diagonal), split into template and mismatch contributions.
struct ArrowheadDecomposition {
  double eta_model = 0.0;
  double eta_mismatch = 0.0;
  Eigen::VectorXd z_model;     // length 2K, nuisance order [phi..., r...]
  Eigen::VectorXd z_mismatch;  // same layout
  Eigen::VectorXd d;           // nuisance diagonal, same layout
  Eigen::VectorXd u;           // sensitivity direction, length 2K+1
  double rho = 0.0;            // concentrated denominator
  AsymptoticTerms terms;
  double bound = 0.0;          // sb2 (C + E) / rho^2
};

ArrowheadDecomposition arrowhead_decomposition(const HarmonicParams& theta,
                                               const TrueSignalSpec& spec,
                                               std::size_t n_samples);

// CRLB on each partial frequency for the unstructured model (K free
// sinusoids). Exact: frequency diagonal of the inverse 3K x 3K Fisher matrix.
// Decoupled: the single-sinusoid closed form 6 sb2 / (r_k^2 N (N^2 - 1)).
Eigen::VectorXd crlb_unstructured(const TrueSignalSpec& spec,
                                  std::size_t n_samples,
                                  bool decoupled = false);

// Per-partial MSE lower bound for harmonic-model frequency estimates:
// bias_k^2 + k^2 * mcrlb_omega, bias_k = k*omega0 - nu_k.
std::vector<double> mse_lower_bound(const std::vector<double>& bias,
                                    double mcrlb_omega);

// Everything the CLI and the speech pipeline report for one configuration.
struct BoundReport {
  std::size_t n_samples = 0;
  std::size_t harmonic_count = 0;
  double noise_variance = 0.0;
  double omega0 = 0.0;
  double pseudo_variance = 0.0;
  double mcrlb_exact_omega = 0.0;
  double mcrlb_asymp_omega = 0.0;
  double crlb_harmonic_omega = 0.0;  // asymptotic sb2 / C
  std::vector<double> crlb_sine;     // unstructured reference, per partial
  std::vector<double> bias;          // k*omega0 - nu_k
  std::vector<double> mse_lb;        // bias^2 + k^2 mcrlb
};

BoundReport compute_bound_report(const TrueSignalSpec& spec,
                                 std::size_t n_samples,
                                 const SearchConfig& search = {},
                                 bool decoupled_sine = false);

std::string bound_report_json(const BoundReport& report);
std::string bound_report_csv(const BoundReport& report);  // header + one row

}  // namespace inharmonica
