#pragma once

#include <cstdint>
#include <random>

#include "inharmonica/types.hpp"

namespace inharmonica {

// Deterministic generator with explicit distributions. std::normal_distribution
// is not bit-portable across standard libraries, so the Gaussian draw is an
// explicit Box-Muller transform; sequences reproduce exactly for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform();

  // Uniform on [0, 2*pi).
  double uniform_angle();

  // Standard normal.
  double normal();

  // Circular complex Gaussian with total variance `variance`
  // (variance/2 per real and imaginary part).
  Complex complex_normal(double variance);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stream derivation for parallel Monte Carlo: collapses (master seed, stream,
// index) into one seed via splitmix64 finalization steps. Distinct inputs give
// uncorrelated, platform-independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) noexcept;

}  // namespace inharmonica
