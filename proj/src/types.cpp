#include "inharmonica/types.hpp"

#include <cmath>
#include <numbers>

namespace inharmonica {

double wrap_angle(double angle) noexcept {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a slightly negative value can round up to exactly 2*pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double circular_distance(double a, double b) noexcept {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

namespace {

void check_component_arrays(const std::vector<double>& amplitudes,
                            const std::vector<double>& phases,
                            std::size_t frequency_count) {
  if (amplitudes.empty()) {
    throw std::invalid_argument("at least one component is required");
  }
  if (phases.size() != amplitudes.size() ||
      frequency_count != amplitudes.size()) {
    throw std::invalid_argument(
        "amplitudes, phases and frequencies must have equal length");
  }
  for (double r : amplitudes) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("amplitudes must be positive and finite");
    }
  }
}

}  // namespace

TrueSignalSpec::TrueSignalSpec(std::vector<double> amplitudes,
                               std::vector<double> phases,
                               std::vector<double> frequencies,
                               double noise_variance)
    : amplitudes_(std::move(amplitudes)),
      phases_(std::move(phases)),
      frequencies_(std::move(frequencies)),
      noise_variance_(noise_variance) {
  check_component_arrays(amplitudes_, phases_, frequencies_.size());
  if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_)) {
    throw std::invalid_argument("noise variance must be finite and >= 0");
  }
  double prev = 0.0;
  for (double nu : frequencies_) {
    if (!(nu > prev)) {
      throw std::invalid_argument(
          "frequencies must be strictly increasing and positive");
    }
    if (!(nu < std::numbers::pi)) {
      throw std::invalid_argument(
          "frequency " + std::to_string(nu) +
          " rad/sample is at or above Nyquist (pi) and would alias");
    }
    prev = nu;
  }
  for (double& p : phases_) p = wrap_angle(p);
}

double TrueSignalSpec::signal_power() const noexcept {
  double s = 0.0;
  for (double r : amplitudes_) s += r * r;
  return s;
}

HarmonicParams::HarmonicParams(double omega, std::vector<double> phases,
                               std::vector<double> amplitudes)
    : omega_(omega),
      phases_(std::move(phases)),
      amplitudes_(std::move(amplitudes)) {
  check_component_arrays(amplitudes_, phases_, phases_.size());
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) {
    throw std::invalid_argument("omega must be positive and finite");
  }
  const double top = omega_ * static_cast<double>(amplitudes_.size());
  if (!(top < kTwoPi)) {
    throw std::invalid_argument(
        "omega * K = " + std::to_string(top) +
        " rad/sample reaches 2*pi; the highest harmonic would alias");
  }
  for (double& p : phases_) p = wrap_angle(p);
}

HarmonicParams HarmonicParams::from_vector(const std::vector<double>& flat) {
  if (flat.size() < 3 || flat.size() % 2 == 0) {
    throw std::invalid_argument(
        "flat parameter vector must have odd length 2K+1 with K >= 1");
  }
  const std::size_t k = (flat.size() - 1) / 2;
  std::vector<double> phases(flat.begin() + 1, flat.begin() + 1 + k);
  std::vector<double> amps(flat.begin() + 1 + k, flat.end());
  return HarmonicParams(flat[0], std::move(phases), std::move(amps));
}

std::vector<double> HarmonicParams::to_vector() const {
  std::vector<double> flat;
  flat.reserve(1 + 2 * harmonic_count());
  flat.push_back(omega_);
  flat.insert(flat.end(), phases_.begin(), phases_.end());
  flat.insert(flat.end(), amplitudes_.begin(), amplitudes_.end());
  return flat;
}

}  // namespace inharmonica
