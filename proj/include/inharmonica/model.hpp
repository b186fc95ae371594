#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "inharmonica/rng.hpp"
#include "inharmonica/types.hpp"

namespace inharmonica {

// Expand an inharmonicity law into K partial frequencies (rad/sample).
// Throws std::invalid_argument if any partial lands at or above Nyquist or the
// ordering degenerates; the message names the offending partial index.
std::vector<double> frequencies_from_law(const InharmonicityLaw& law,
                                         std::size_t count);

// Sample x_t = sum_k rb_k exp(i(phib_k + nu_k t)), t = 0..N-1, plus circular
// complex Gaussian noise when an rng is supplied and noise_variance > 0.
ComplexSeries synthesize_true(const TrueSignalSpec& spec, std::size_t n_samples,
                              Rng& rng);
ComplexSeries synthesize_true(const TrueSignalSpec& spec, std::size_t n_samples,
                              std::optional<std::uint64_t> seed = std::nullopt);

// Noise-free harmonic model xt_t = sum_k r_k exp(i(phi_k + i k omega t)).
ComplexSeries synthesize_model(const HarmonicParams& params,
                               std::size_t n_samples);

// Gradient of the model sample at time t with respect to
// theta = [omega, phi_1..phi_K, r_1..r_K]; length 2K+1.
Eigen::VectorXcd model_gradient(const HarmonicParams& params, double t);

// Hessian of the model sample at time t, (2K+1) x (2K+1), symmetric.
// Entries coupling different harmonics vanish except through omega.
Eigen::MatrixXcd model_hessian(const HarmonicParams& params, double t);

}  // namespace inharmonica
