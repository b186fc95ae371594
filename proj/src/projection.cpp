#include "inharmonica/projection.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace inharmonica::detail {

namespace {

constexpr std::size_t kAnchor = 256;

// sum_{t=0}^{N-1} exp(i phi t), the Dirichlet-type Gram entry.
Complex geometric_sum(double phi, std::size_t n) {
  const Complex step = std::polar(1.0, phi);
  const Complex one(1.0, 0.0);
  if (std::abs(one - step) < 1e-12) return Complex(static_cast<double>(n), 0.0);
  const Complex top = std::polar(1.0, phi * static_cast<double>(n));
  return (one - top) / (one - step);
}

// rotators[t] = exp(-i omega t), re-anchored periodically against drift.
void fill_rotators(std::vector<Complex>& rotators, double omega,
                   std::size_t n) {
  rotators.resize(n);
  const Complex step = std::polar(1.0, -omega);
  Complex value(1.0, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (t % kAnchor == 0) value = std::polar(1.0, -omega * static_cast<double>(t));
    rotators[t] = value;
    value *= step;
  }
}

void solve_amplitudes(ProjectionScratch& scratch, std::size_t k_count,
                      double omega_for_message) {
  scratch.chol.compute(scratch.gram);
  if (scratch.chol.info() != Eigen::Success) {
    throw NumericalError(
        "atom Gram matrix is not positive definite at omega = " +
        std::to_string(omega_for_message) + " rad/sample");
  }
}

double direct_residual_energy(const ComplexSeries& x,
                              const std::vector<Complex>& model) {
  double energy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    energy += std::norm(x[t] - model[t]);
  }
  return energy;
}

}  // namespace

Projection project_harmonic(const ComplexSeries& x, std::size_t k_count,
                            double omega, ProjectionScratch& scratch,
                            bool direct_residual) {
  const std::size_t n = x.size();
  if (k_count == 0 || n == 0) {
    throw std::invalid_argument("projection needs k_count >= 1 and samples");
  }
  const auto kc = static_cast<Eigen::Index>(k_count);
  scratch.gram.resize(kc, kc);
  scratch.rhs.resize(kc);
  fill_rotators(scratch.rotators, omega, n);

  // Toeplitz Gram from the closed-form geometric sums.
  for (Eigen::Index m = 0; m < kc; ++m) {
    const Complex g = geometric_sum(omega * static_cast<double>(m), n);
    for (Eigen::Index j = 0; m + j < kc; ++j) {
      scratch.gram(j, j + m) = g;
      scratch.gram(j + m, j) = std::conj(g);
    }
  }

  // rhs_k = sum_t x_t exp(-i k omega t) via running powers of the rotator.
  scratch.powers.assign(n, Complex(1.0, 0.0));
  double x_energy = 0.0;
  for (std::size_t t = 0; t < n; ++t) x_energy += std::norm(x[t]);
  for (Eigen::Index k = 0; k < kc; ++k) {
    Complex acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      scratch.powers[t] *= scratch.rotators[t];
      acc += x[t] * scratch.powers[t];
    }
    scratch.rhs(k) = acc;
  }

  solve_amplitudes(scratch, k_count, omega);
  Projection out;
  out.amplitudes = scratch.chol.solve(scratch.rhs);

  if (direct_residual) {
    scratch.model.assign(n, Complex(0.0, 0.0));
    scratch.powers.assign(n, Complex(1.0, 0.0));
    for (Eigen::Index k = 0; k < kc; ++k) {
      const Complex c = out.amplitudes(k);
      for (std::size_t t = 0; t < n; ++t) {
        scratch.powers[t] *= scratch.rotators[t];
        scratch.model[t] += c * std::conj(scratch.powers[t]);
      }
    }
    out.residual_energy = direct_residual_energy(x, scratch.model);
  } else {
    const double fitted = out.amplitudes.dot(scratch.rhs).real();
    out.residual_energy = std::max(0.0, x_energy - fitted);
  }
  return out;
}

Projection project_frequencies(const ComplexSeries& x,
                               const std::vector<double>& freqs,
                               ProjectionScratch& scratch,
                               bool direct_residual) {
  const std::size_t n = x.size();
  const std::size_t k_count = freqs.size();
  if (k_count == 0 || n == 0) {
    throw std::invalid_argument("projection needs frequencies and samples");
  }
  const auto kc = static_cast<Eigen::Index>(k_count);
  scratch.gram.resize(kc, kc);
  scratch.rhs.resize(kc);

  for (Eigen::Index j = 0; j < kc; ++j) {
    for (Eigen::Index k = j; k < kc; ++k) {
      const Complex g = geometric_sum(freqs[k] - freqs[j], n);
      scratch.gram(j, k) = g;
      scratch.gram(k, j) = std::conj(g);
    }
  }

  double x_energy = 0.0;
  for (std::size_t t = 0; t < n; ++t) x_energy += std::norm(x[t]);
  for (Eigen::Index k = 0; k < kc; ++k) {
    fill_rotators(scratch.rotators, freqs[static_cast<std::size_t>(k)], n);
    Complex acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) acc += x[t] * scratch.rotators[t];
    scratch.rhs(k) = acc;
  }

  solve_amplitudes(scratch, k_count, freqs[0]);
  Projection out;
  out.amplitudes = scratch.chol.solve(scratch.rhs);

  if (direct_residual) {
    scratch.model.assign(n, Complex(0.0, 0.0));
    for (Eigen::Index k = 0; k < kc; ++k) {
      fill_rotators(scratch.rotators, freqs[static_cast<std::size_t>(k)], n);
      const Complex c = out.amplitudes(k);
      for (std::size_t t = 0; t < n; ++t) {
        scratch.model[t] += c * std::conj(scratch.rotators[t]);
      }
    }
    out.residual_energy = direct_residual_energy(x, scratch.model);
  } else {
    const double fitted = out.amplitudes.dot(scratch.rhs).real();
    out.residual_energy = std::max(0.0, x_energy - fitted);
  }
  return out;
}

double harmonic_residual_derivative(const ComplexSeries& x,
                                    std::size_t k_count, double omega,
                                    ProjectionScratch& scratch,
                                    Projection* fit_out) {
  const Projection fit = project_harmonic(x, k_count, omega, scratch, true);
  const std::size_t n = x.size();
  // scratch.rotators still holds exp(-i omega t); s_t = sum_k k a_k e^{ik w t}
  // accumulates through running conjugate powers.
  scratch.powers.assign(n, Complex(1.0, 0.0));
  std::vector<Complex> weighted(n, Complex(0.0, 0.0));
  for (std::size_t k = 1; k <= k_count; ++k) {
    const Complex a = fit.amplitudes(static_cast<Eigen::Index>(k - 1)) *
                      static_cast<double>(k);
    for (std::size_t t = 0; t < n; ++t) {
      scratch.powers[t] *= scratch.rotators[t];
      weighted[t] += a * std::conj(scratch.powers[t]);
    }
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Complex residual = x[t] - scratch.model[t];
    acc += static_cast<double>(t) * std::imag(std::conj(weighted[t]) * residual);
  }
  if (fit_out != nullptr) *fit_out = fit;
  return -2.0 * acc;
}

double frequency_residual_derivative(const ComplexSeries& x,
                                     const std::vector<double>& freqs,
                                     std::size_t index,
                                     ProjectionScratch& scratch,
                                     Projection* fit_out) {
  const Projection fit = project_frequencies(x, freqs, scratch, true);
  const std::size_t n = x.size();
  fill_rotators(scratch.rotators, freqs[index], n);
  const Complex a = fit.amplitudes(static_cast<Eigen::Index>(index));
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const Complex residual = x[t] - scratch.model[t];
    acc += static_cast<double>(t) *
           std::imag(std::conj(a) * scratch.rotators[t] * residual);
  }
  if (fit_out != nullptr) *fit_out = fit;
  return -2.0 * acc;
}

namespace {

double gram_condition_impl(const Eigen::MatrixXcd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram,
                                                      Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

double harmonic_gram_condition(std::size_t n_samples, std::size_t k_count,
                               double omega) {
  const auto kc = static_cast<Eigen::Index>(k_count);
  Eigen::MatrixXcd gram(kc, kc);
  for (Eigen::Index m = 0; m < kc; ++m) {
    const Complex g = geometric_sum(omega * static_cast<double>(m), n_samples);
    for (Eigen::Index j = 0; m + j < kc; ++j) {
      gram(j, j + m) = g;
      gram(j + m, j) = std::conj(g);
    }
  }
  return gram_condition_impl(gram);
}

double gram_condition(std::size_t n_samples, const std::vector<double>& freqs) {
  const auto kc = static_cast<Eigen::Index>(freqs.size());
  Eigen::MatrixXcd gram(kc, kc);
  for (Eigen::Index j = 0; j < kc; ++j) {
    for (Eigen::Index k = j; k < kc; ++k) {
      const Complex g = geometric_sum(freqs[k] - freqs[j], n_samples);
      gram(j, k) = g;
      gram(k, j) = std::conj(g);
    }
  }
  return gram_condition_impl(gram);
}

}  // namespace inharmonica::detail
