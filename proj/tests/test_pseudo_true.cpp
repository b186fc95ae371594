#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "inharmonica/model.hpp"
#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/types.hpp"

#include "helpers.hpp"

using namespace inharmonica;

namespace {

// Independent least-squares projection: best harmonic amplitudes at a fixed
// omega via dense normal equations, returning the residual energy.
double projected_residual(const ComplexSeries& x, std::size_t k_count,
                          double omega) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto kc = static_cast<Eigen::Index>(k_count);
  Eigen::MatrixXcd z(n, kc);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index k = 1; k <= kc; ++k) {
      z(t, k - 1) = std::polar(
          1.0, static_cast<double>(k) * omega * static_cast<double>(t));
    }
  }
  Eigen::VectorXcd xv(n);
  for (Eigen::Index t = 0; t < n; ++t) xv(t) = x[static_cast<std::size_t>(t)];
  const Eigen::VectorXcd a =
      (z.adjoint() * z).ldlt().solve(z.adjoint() * xv);
  return (xv - z * a).squaredNorm();
}

}  // namespace

TEST_CASE("waveform_diff subtracts the true waveform pointwise") {
  SUBCASE("vanishes when the model point reproduces a harmonic truth") {
    const std::size_t k_count = 4;
    const auto amps = testutil::bell_amplitudes(k_count);
    const auto phases = testutil::draw_phases(k_count, 3);
    const auto freqs = frequencies_from_law(StiffnessLaw{0.11, 0.0}, k_count);
    TrueSignalSpec spec(amps, phases, freqs, 0.3);
    HarmonicParams theta(0.11, phases, amps);
    const auto diff = waveform_diff(theta, spec, 128);
    for (const Complex& d : diff) CHECK(std::abs(d) < 1e-12);
  }

  SUBCASE("single-sample case reduces to the phasor sums") {
    TrueSignalSpec spec({1.0, 0.5}, {0.2, 1.4}, {0.3, 0.7}, 0.0);
    HarmonicParams theta(0.31, {0.1, 1.5}, {0.9, 0.6});
    const auto diff = waveform_diff(theta, spec, 1);
    REQUIRE(diff.size() == 1);
    Complex expected{0.0, 0.0};
    for (std::size_t k = 0; k < 2; ++k) {
      expected += theta.amplitudes()[k] * std::polar(1.0, theta.phases()[k]);
      expected -= spec.amplitudes()[k] * std::polar(1.0, spec.phases()[k]);
    }
    CHECK(std::abs(diff[0] - expected) < 1e-14);
  }

  SUBCASE("order mismatch is rejected") {
    TrueSignalSpec spec({1.0, 0.5, 0.2}, {0.0, 0.0, 0.0}, {0.3, 0.6, 0.9}, 0.0);
    HarmonicParams theta(0.3, {0.0, 0.0}, {1.0, 0.5});
    CHECK_THROWS_AS(waveform_diff(theta, spec, 32), std::invalid_argument);
  }

  SUBCASE("mismatch energy matches a direct loop on the reference config") {
    const auto spec = testutil::reference_spec(1e-4, 10.0);
    HarmonicParams theta(0.0786, spec.phases(), spec.amplitudes());
    const std::size_t n = 200;
    const auto diff = waveform_diff(theta, spec, n);
    const auto xm = synthesize_model(theta, n);
    const auto xt = synthesize_true(spec, n);
    double energy = 0.0, expected = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      energy += std::norm(diff[t]);
      expected += std::norm(xm[t] - xt[t]);
    }
    CHECK(testutil::rel_err(energy, expected) < 1e-12);
  }
}

TEST_CASE("pseudo variance adds the per-sample mismatch energy") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  HarmonicParams theta(0.0786, spec.phases(), spec.amplitudes());
  const std::size_t n = 200;
  const auto diff = waveform_diff(theta, spec, n);
  double energy = 0.0;
  for (const Complex& d : diff) energy += std::norm(d);
  const double expected = spec.noise_variance() + energy / static_cast<double>(n);
  CHECK(pseudo_variance(spec, theta, n) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(pseudo_variance(spec, theta, 0), std::invalid_argument);
}

TEST_CASE("pseudo-true point recovers an exactly harmonic truth") {
  const std::size_t k_count = 6;
  const double omega = 0.09;
  const auto amps = testutil::bell_amplitudes(k_count);
  const auto phases = testutil::draw_phases(k_count, 5);
  const auto freqs = frequencies_from_law(StiffnessLaw{omega, 0.0}, k_count);
  TrueSignalSpec spec(amps, phases, freqs, 0.4);

  const auto result = solve_pseudo_true(spec, 256);
  CHECK(result.converged);
  CHECK(testutil::rel_err(result.params.omega(), omega) < 1e-10);
  CHECK(result.residual_energy < 1e-12);
  CHECK(testutil::rel_err(result.pseudo_variance, 0.4) < 1e-12);
  for (std::size_t k = 0; k < k_count; ++k) {
    CHECK(circular_distance(result.params.phases()[k], phases[k]) < 1e-7);
    CHECK(testutil::rel_err(result.params.amplitudes()[k], amps[k]) < 1e-8);
  }
}

TEST_CASE("a single component is matched exactly") {
  TrueSignalSpec spec({0.8}, {1.1}, {0.123}, 0.0);
  const auto result = solve_pseudo_true(spec, 200);
  CHECK(result.converged);
  CHECK(testutil::rel_err(result.params.omega(), 0.123) < 1e-12);
  CHECK(result.residual_energy < 1e-14);
}

TEST_CASE("solver argmin agrees with a dense grid on the projected residual") {
  const std::size_t k_count = 3;
  const double omega = 0.11;
  const auto freqs = frequencies_from_law(StiffnessLaw{omega, 2e-3}, k_count);
  TrueSignalSpec spec({1.0, 0.7, 0.4}, {0.5, 2.0, 4.0}, freqs, 0.2);
  const std::size_t n = 64;

  SearchConfig search;
  search.window_lo = 0.9 * omega;
  search.window_hi = 1.1 * omega;
  const auto result = solve_pseudo_true(spec, n, search);

  const auto x = synthesize_true(spec, n);
  const std::size_t grid = 50000;
  const double step = (search.window_hi - search.window_lo) / grid;
  double best = std::numeric_limits<double>::infinity();
  double best_omega = 0.0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double w = search.window_lo + step * static_cast<double>(i);
    const double value = projected_residual(x, k_count, w);
    if (value < best) {
      best = value;
      best_omega = w;
    }
  }
  CHECK(std::abs(result.params.omega() - best_omega) <= step);
  CHECK(result.residual_energy <= best * (1.0 + 1e-9));
}

TEST_CASE("pseudo-true point is a local minimum of the projected residual") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  const std::size_t n = 200;
  const auto result = solve_pseudo_true(spec, n);
  CHECK(result.converged);
  const auto x = synthesize_true(spec, n);
  const double at_min =
      projected_residual(x, spec.component_count(), result.params.omega());
  for (double h : {1e-9, 1e-7, 1e-5}) {
    CHECK(at_min <= projected_residual(x, spec.component_count(),
                                       result.params.omega() + h) *
                        (1.0 + 1e-12));
    CHECK(at_min <= projected_residual(x, spec.component_count(),
                                       result.params.omega() - h) *
                        (1.0 + 1e-12));
  }
}

TEST_CASE("pseudo variance never falls below the true noise floor") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k_count = 2 + static_cast<std::size_t>(trial % 4);
    const double omega = 0.05 + 0.15 * rng.uniform();
    const double beta = 5e-3 * rng.uniform();
    std::vector<double> amps(k_count), phases(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      amps[k] = 0.5 + rng.uniform();
      phases[k] = rng.uniform_angle();
    }
    const auto freqs =
        frequencies_from_law(StiffnessLaw{omega, beta}, k_count);
    const double sb2 = 0.1 + rng.uniform();
    TrueSignalSpec spec(amps, phases, freqs, sb2);
    const std::size_t n = 64 + 32 * static_cast<std::size_t>(trial % 3);

    SearchConfig search;
    search.omega_hint = omega;
    const auto result = solve_pseudo_true(spec, n, search);
    CHECK(result.pseudo_variance >= sb2);
    CHECK(result.pseudo_variance ==
          doctest::Approx(sb2 + result.residual_energy / static_cast<double>(n))
              .epsilon(1e-12));
  }
}

TEST_CASE("solution is stable under omega hint perturbations") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  SearchConfig base;
  base.omega_hint = spec.frequencies().front();
  const auto ref = solve_pseudo_true(spec, 200, base);
  for (double scale : {0.98, 1.02}) {
    SearchConfig search;
    search.omega_hint = spec.frequencies().front() * scale;
    const auto result = solve_pseudo_true(spec, 200, search);
    CHECK(std::abs(result.params.omega() - ref.params.omega()) < 1e-10);
  }
}

TEST_CASE("refinement only improves on the grid stage") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  SearchConfig coarse;
  coarse.max_refine_iterations = 0;
  const auto grid_only = solve_pseudo_true(spec, 200, coarse);
  CHECK_FALSE(grid_only.converged);
  CHECK(grid_only.iterations == 0);

  const auto refined = solve_pseudo_true(spec, 200);
  CHECK(refined.converged);
  CHECK(refined.iterations > 0);
  CHECK(refined.residual_energy <= grid_only.residual_energy * (1.0 + 1e-12));
}

TEST_CASE("degenerate searches are reported, not silently absorbed") {
  TrueSignalSpec spec({1.0, 0.5, 0.3}, {0.0, 1.0, 2.0}, {0.3, 0.61, 0.92}, 0.1);

  SearchConfig tiny;
  tiny.window_lo = 1e-12;
  tiny.window_hi = 2e-12;
  CHECK_THROWS_AS(solve_pseudo_true(spec, 64, tiny), NumericalError);

  SearchConfig empty;
  empty.omega_hint = 10.0;  // hint window collapses against the alias cap
  CHECK_THROWS_AS(solve_pseudo_true(spec, 64, empty), std::invalid_argument);

  CHECK_THROWS_AS(solve_pseudo_true(spec, 4, SearchConfig{}),
                  std::invalid_argument);  // fewer than 2K+1 samples
}
