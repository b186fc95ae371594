#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace inharmonica {

using Complex = std::complex<double>;

// Uniformly sampled complex baseband series, t = 0..N-1.
using ComplexSeries = std::vector<Complex>;

// Thrown when a computation is numerically unusable (ill-conditioned matrix,
// degenerate denominator), as opposed to a contract violation on the inputs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduce an angle to [0, 2*pi).
double wrap_angle(double angle) noexcept;

// Smallest absolute angular separation between two angles.
double circular_distance(double a, double b) noexcept;

// Stiffness-type partial frequencies nu_k = omega * k * sqrt(1 + beta * k^2).
struct StiffnessLaw {
  double omega = 0.0;
  double beta = 0.0;
};

// Additive detuning nu_k = omega * k + delta_k; offsets indexed k = 1..K.
struct OffsetLaw {
  double omega = 0.0;
  std::vector<double> offsets;
};

using InharmonicityLaw = std::variant<StiffnessLaw, OffsetLaw>;

// Ground-truth signal: K sinusoids with arbitrary (non-harmonic) frequencies
// plus circular complex Gaussian noise of total variance noise_variance.
class TrueSignalSpec {
 public:
  TrueSignalSpec(std::vector<double> amplitudes, std::vector<double> phases,
                 std::vector<double> frequencies, double noise_variance);

  std::size_t component_count() const noexcept { return amplitudes_.size(); }
  const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  const std::vector<double>& frequencies() const noexcept { return frequencies_; }
  double noise_variance() const noexcept { return noise_variance_; }

  // Sum of squared amplitudes (mean power of the noise-free signal).
  double signal_power() const noexcept;

 private:
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
  std::vector<double> frequencies_;
  double noise_variance_;
};

// Harmonic-model parameter point theta = [omega, phi_1..phi_K, r_1..r_K].
class HarmonicParams {
 public:
  HarmonicParams(double omega, std::vector<double> phases,
                 std::vector<double> amplitudes);

  static HarmonicParams from_vector(const std::vector<double>& flat);
  std::vector<double> to_vector() const;

  std::size_t harmonic_count() const noexcept { return amplitudes_.size(); }
  double omega() const noexcept { return omega_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }

  // Flat-vector index helpers for the canonical ordering; k is 1-based.
  static std::size_t omega_index() noexcept { return 0; }
  static std::size_t phase_index(std::size_t k) noexcept { return k; }
  std::size_t amplitude_index(std::size_t k) const noexcept {
    return harmonic_count() + k;
  }

 private:
  double omega_;
  std::vector<double> phases_;
  std::vector<double> amplitudes_;
};

}  // namespace inharmonica
