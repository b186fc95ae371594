#include <doctest.h>

#include <cmath>
#include <vector>

#include "inharmonica/estimators.hpp"
#include "inharmonica/model.hpp"
#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/types.hpp"

#include "helpers.hpp"

using namespace inharmonica;

TEST_CASE("harmonic MLE recovers a noise-free harmonic signal") {
  const std::size_t k_count = 5;
  const double omega = 0.09;
  const auto amps = testutil::bell_amplitudes(k_count);
  const auto phases = testutil::draw_phases(k_count, 4);
  HarmonicParams truth(omega, phases, amps);
  const auto x = synthesize_model(truth, 256);

  const auto est = harmonic_mle(x, k_count);
  CHECK(est.converged);
  CHECK(testutil::rel_err(est.params.omega(), omega) < 1e-10);
  CHECK(est.residual_variance < 1e-15);
  for (std::size_t k = 0; k < k_count; ++k) {
    CHECK(circular_distance(est.params.phases()[k], phases[k]) < 1e-7);
    CHECK(testutil::rel_err(est.params.amplitudes()[k], amps[k]) < 1e-8);
  }
}

TEST_CASE("noise-free MLE and pseudo-true solver share one optimum") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  const std::size_t n = 200;
  SearchConfig search;
  search.omega_hint = spec.frequencies().front();

  const auto pt = solve_pseudo_true(spec, n, search);
  const auto est = harmonic_mle(synthesize_true(spec, n),
                                spec.component_count(), search);
  CHECK(est.params.omega() == pt.params.omega());
  CHECK(est.params.phases() == pt.params.phases());
  CHECK(est.params.amplitudes() == pt.params.amplitudes());
}

TEST_CASE("unstructured MLE pins a single sinusoid") {
  TrueSignalSpec spec({0.9}, {0.8}, {0.37}, 0.0);
  const auto x = synthesize_true(spec, 200);
  const auto est = unstructured_mle(x, {0.372});
  CHECK(est.converged);
  REQUIRE(est.params.frequencies.size() == 1);
  CHECK(std::abs(est.params.frequencies[0] - 0.37) < 1e-10);
  CHECK(testutil::rel_err(est.params.amplitudes[0], 0.9) < 1e-9);
  CHECK(circular_distance(est.params.phases[0], 0.8) < 1e-8);
  CHECK(est.residual_variance < 1e-15);
}

TEST_CASE("unstructured MLE resolves inharmonic partials from oracle inits") {
  const std::size_t k_count = 3;
  const auto freqs = frequencies_from_law(StiffnessLaw{0.12, 2e-3}, k_count);
  TrueSignalSpec spec({1.0, 0.6, 0.4}, {0.3, 1.7, 3.9}, freqs, 0.0);
  const auto x = synthesize_true(spec, 256);

  std::vector<double> inits = freqs;
  for (double& f : inits) f *= 1.001;
  const auto est = unstructured_mle(x, inits);
  CHECK(est.converged);
  for (std::size_t k = 0; k < k_count; ++k) {
    CHECK(std::abs(est.params.frequencies[k] - freqs[k]) < 1e-8);
    CHECK(testutil::rel_err(est.params.amplitudes[k],
                            spec.amplitudes()[k]) < 1e-6);
    CHECK(circular_distance(est.params.phases[k], spec.phases()[k]) < 1e-6);
  }
  CHECK(est.residual_variance < 1e-12);
}

TEST_CASE("colliding frequency tracks are flagged as non-converged") {
  // Two true lines closer than the resolvability floor pi/(4N): the tracks
  // settle within the floor of each other and the fit refuses to claim
  // convergence.
  const double nu0 = 0.5;
  const double nu1 = 0.5 + std::numbers::pi / (8.0 * 64.0);
  TrueSignalSpec spec({1.0, 0.8}, {0.4, 2.1}, {nu0, nu1}, 0.0);
  const auto x = synthesize_true(spec, 64);
  const auto est = unstructured_mle(x, {0.499, 0.507});
  CHECK_FALSE(est.converged);
}

TEST_CASE("free frequencies fit at least as well as the harmonic constraint") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  const std::size_t n = 200;
  const auto x = synthesize_true(spec, n);

  const auto harmonic = harmonic_mle(x, spec.component_count());
  const auto free = unstructured_mle(x, spec.frequencies());
  CHECK(free.converged);
  CHECK(free.residual_variance <=
        harmonic.residual_variance * (1.0 + 1e-9));
}

TEST_CASE("input validation on the estimator entry points") {
  TrueSignalSpec spec({1.0}, {0.0}, {0.5}, 0.0);
  const auto x = synthesize_true(spec, 64);
  CHECK_THROWS_AS(harmonic_mle(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(unstructured_mle(x, {}), std::invalid_argument);
  CHECK_THROWS_AS(unstructured_mle(x, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(unstructured_mle(x, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("estimator mean approaches the pseudo-true omega") {
  const std::size_t k_count = 3;
  const auto amps = testutil::bell_amplitudes(k_count);
  const auto phases = testutil::draw_phases(k_count, 6);
  const auto freqs = frequencies_from_law(StiffnessLaw{0.11, 0.0}, k_count);
  double power = 0.0;
  for (double r : amps) power += r * r;
  TrueSignalSpec spec(amps, phases, freqs, power / 1e4);  // 40 dB

  SearchConfig search;
  search.omega_hint = 0.11;
  const auto rows =
      asymptotic_mle_consistency_check(spec, {64, 128}, 16, 3, search);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.n_converged == 16);
    CHECK(testutil::rel_err(row.omega0, 0.11) < 1e-9);
    CHECK(row.mean_abs_gap ==
          doctest::Approx(std::abs(row.mean_estimate - row.omega0))
              .epsilon(1e-12));
    CHECK(row.mean_abs_gap < 3.0 * row.standard_error + 1e-9);
  }
}
