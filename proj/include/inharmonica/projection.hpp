#pragma once

#include <Eigen/Dense>

#include "inharmonica/types.hpp"

namespace inharmonica::detail {

// Scratch buffers reused across candidate frequencies so grid scans do not
// allocate per candidate.
struct ProjectionScratch {
  std::vector<Complex> rotators;
  std::vector<Complex> powers;
  std::vector<Complex> model;
  Eigen::MatrixXcd gram;
  Eigen::VectorXcd rhs;
  Eigen::LLT<Eigen::MatrixXcd> chol;
};

struct Projection {
  double residual_energy = 0.0;
  Eigen::VectorXcd amplitudes;
};

// Least-squares fit of x to sum_k c_k exp(i k omega t), k = 1..k_count.
// With direct_residual the residual is synthesized and subtracted, which stays
// accurate when the fit is near-perfect; the quadratic form
// ||x||^2 - Re(c^H b) is cheaper and good enough for bracketing a minimum
// (it loses to cancellation around ~1e-13 * ||x||^2).
Projection project_harmonic(const ComplexSeries& x, std::size_t k_count,
                            double omega, ProjectionScratch& scratch,
                            bool direct_residual);

// Same fit for arbitrary distinct atom frequencies (rad/sample).
Projection project_frequencies(const ComplexSeries& x,
                               const std::vector<double>& freqs,
                               ProjectionScratch& scratch,
                               bool direct_residual);

// d/d omega of the projected residual energy ||x - B(omega) a||^2 at the
// least-squares a; the term through da/domega vanishes at the projection.
// Runs the projection itself; fit_out (optional) receives it. Unlike
// comparisons of near-equal residual values, the derivative sign stays
// meaningful down to the representable floor, so refiners bisect on it.
double harmonic_residual_derivative(const ComplexSeries& x,
                                    std::size_t k_count, double omega,
                                    ProjectionScratch& scratch,
                                    Projection* fit_out);

// Same derivative with respect to freqs[index] for the free-frequency fit.
double frequency_residual_derivative(const ComplexSeries& x,
                                     const std::vector<double>& freqs,
                                     std::size_t index,
                                     ProjectionScratch& scratch,
                                     Projection* fit_out);

// 2-norm condition number of the atom Gram matrix.
double harmonic_gram_condition(std::size_t n_samples, std::size_t k_count,
                               double omega);
double gram_condition(std::size_t n_samples, const std::vector<double>& freqs);

}  // namespace inharmonica::detail
