#include "inharmonica/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace inharmonica {

namespace {

void check_partial(double nu, double prev, std::size_t k) {
  if (!(nu > prev)) {
    throw std::invalid_argument("partial " + std::to_string(k) +
                                " is not above its predecessor; law degenerates");
  }
  if (!(nu < std::numbers::pi)) {
    throw std::invalid_argument("partial " + std::to_string(k) + " at " +
                                std::to_string(nu) +
                                " rad/sample aliases (>= pi)");
  }
}

}  // namespace

std::vector<double> frequencies_from_law(const InharmonicityLaw& law,
                                         std::size_t count) {
  if (count == 0) throw std::invalid_argument("component count must be >= 1");
  std::vector<double> nus(count);
  if (const auto* stiff = std::get_if<StiffnessLaw>(&law)) {
    if (!(stiff->omega > 0.0)) {
      throw std::invalid_argument("law omega must be positive");
    }
    if (stiff->beta < 0.0) {
      throw std::invalid_argument("stiffness beta must be >= 0");
    }
    double prev = 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
      const double dk = static_cast<double>(k);
      nus[k - 1] = stiff->omega * dk * std::sqrt(1.0 + stiff->beta * dk * dk);
      check_partial(nus[k - 1], prev, k);
      prev = nus[k - 1];
    }
  } else {
    const auto& off = std::get<OffsetLaw>(law);
    if (!(off.omega > 0.0)) {
      throw std::invalid_argument("law omega must be positive");
    }
    if (off.offsets.size() != count) {
      throw std::invalid_argument("offset law needs exactly one delta per partial");
    }
    double prev = 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
      nus[k - 1] = off.omega * static_cast<double>(k) + off.offsets[k - 1];
      check_partial(nus[k - 1], prev, k);
      prev = nus[k - 1];
    }
  }
  return nus;
}

namespace {

// Accumulate r * exp(i(phi + nu t)) for t = 0..N-1 into series. The rotator
// recurrence is re-anchored with an exact polar() every block to keep phase
// drift below ~1e-14 regardless of N.
void add_tone(ComplexSeries& series, double amplitude, double phase,
              double nu) {
  constexpr std::size_t kAnchor = 256;
  const Complex step = std::polar(1.0, nu);
  Complex value = std::polar(amplitude, phase);
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (t % kAnchor == 0) {
      value = std::polar(amplitude, phase + nu * static_cast<double>(t));
    }
    series[t] += value;
    value *= step;
  }
}

}  // namespace

ComplexSeries synthesize_true(const TrueSignalSpec& spec, std::size_t n_samples,
                              Rng& rng) {
  ComplexSeries x(n_samples, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < spec.component_count(); ++k) {
    add_tone(x, spec.amplitudes()[k], spec.phases()[k], spec.frequencies()[k]);
  }
  if (spec.noise_variance() > 0.0) {
    for (auto& sample : x) sample += rng.complex_normal(spec.noise_variance());
  }
  return x;
}

ComplexSeries synthesize_true(const TrueSignalSpec& spec, std::size_t n_samples,
                              std::optional<std::uint64_t> seed) {
  if (!seed.has_value()) {
    ComplexSeries x(n_samples, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < spec.component_count(); ++k) {
      add_tone(x, spec.amplitudes()[k], spec.phases()[k], spec.frequencies()[k]);
    }
    return x;
  }
  Rng rng(*seed);
  return synthesize_true(spec, n_samples, rng);
}

ComplexSeries synthesize_model(const HarmonicParams& params,
                               std::size_t n_samples) {
  ComplexSeries x(n_samples, Complex(0.0, 0.0));
  for (std::size_t k = 1; k <= params.harmonic_count(); ++k) {
    add_tone(x, params.amplitudes()[k - 1], params.phases()[k - 1],
             params.omega() * static_cast<double>(k));
  }
  return x;
}

Eigen::VectorXcd model_gradient(const HarmonicParams& params, double t) {
  const std::size_t k_count = params.harmonic_count();
  Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(2 * k_count + 1);
  const Complex i_unit(0.0, 1.0);
  for (std::size_t k = 1; k <= k_count; ++k) {
    const double dk = static_cast<double>(k);
    const double r = params.amplitudes()[k - 1];
    const Complex tone =
        std::polar(1.0, params.phases()[k - 1] + dk * params.omega() * t);
    grad(0) += i_unit * dk * t * r * tone;
    grad(params.phase_index(k)) = i_unit * r * tone;
    grad(params.amplitude_index(k)) = tone;
  }
  return grad;
}

Eigen::MatrixXcd model_hessian(const HarmonicParams& params, double t) {
  const std::size_t k_count = params.harmonic_count();
  const std::size_t dim = 2 * k_count + 1;
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(dim, dim);
  const Complex i_unit(0.0, 1.0);
  for (std::size_t k = 1; k <= k_count; ++k) {
    const double dk = static_cast<double>(k);
    const double r = params.amplitudes()[k - 1];
    const Complex tone =
        std::polar(1.0, params.phases()[k - 1] + dk * params.omega() * t);
    const std::size_t pk = params.phase_index(k);
    const std::size_t rk = params.amplitude_index(k);
    hess(0, 0) -= dk * dk * t * t * r * tone;
    hess(0, pk) = hess(pk, 0) = -dk * t * r * tone;
    hess(0, rk) = hess(rk, 0) = i_unit * dk * t * tone;
    hess(pk, pk) = -r * tone;
    hess(pk, rk) = hess(rk, pk) = i_unit * tone;
    // d^2/dr_k^2 = 0; different harmonics never couple directly.
  }
  return hess;
}

}  // namespace inharmonica
