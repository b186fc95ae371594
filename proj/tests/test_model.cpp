#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "inharmonica/model.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/types.hpp"

#include "helpers.hpp"

using namespace inharmonica;

namespace {

// Direct transcription of the waveform sum, independent of synthesize_model.
Complex model_sample(const HarmonicParams& params, double t) {
  Complex acc{0.0, 0.0};
  for (std::size_t k = 1; k <= params.harmonic_count(); ++k) {
    const double arg =
        params.phases()[k - 1] + static_cast<double>(k) * params.omega() * t;
    acc += params.amplitudes()[k - 1] * std::polar(1.0, arg);
  }
  return acc;
}

}  // namespace

TEST_CASE("stiffness law expands to stretched multiples") {
  const double omega = std::numbers::pi / 40.0;

  const auto harmonic = frequencies_from_law(StiffnessLaw{omega, 0.0}, 3);
  REQUIRE(harmonic.size() == 3);
  CHECK(harmonic[0] == doctest::Approx(omega).epsilon(1e-15));
  CHECK(harmonic[1] == doctest::Approx(2.0 * omega).epsilon(1e-15));
  CHECK(harmonic[2] == doctest::Approx(3.0 * omega).epsilon(1e-15));

  const auto stretched = frequencies_from_law(StiffnessLaw{omega, 1e-4}, 10);
  const double expected = omega * 10.0 * std::sqrt(1.0 + 1e-4 * 100.0);
  CHECK(stretched[9] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(stretched[9] == doctest::Approx(std::numbers::pi / 4.0 * std::sqrt(1.01))
                            .epsilon(1e-15));
}

TEST_CASE("offset law adds per-partial detunings") {
  const auto nus = frequencies_from_law(OffsetLaw{0.1, {0.0, 0.01}}, 2);
  CHECK(nus[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(nus[1] == doctest::Approx(0.21).epsilon(1e-15));
}

TEST_CASE("law validation names the offending partial") {
  // 7 * 0.5 = 3.5 >= pi: partial 7 is the first to alias.
  CHECK_THROWS_WITH_AS(frequencies_from_law(StiffnessLaw{0.5, 0.0}, 10),
                       doctest::Contains("partial 7"), std::invalid_argument);
  CHECK_THROWS_AS(frequencies_from_law(StiffnessLaw{-0.1, 0.0}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(frequencies_from_law(StiffnessLaw{0.1, -1.0}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(frequencies_from_law(OffsetLaw{0.1, {0.0}}, 2),
                  std::invalid_argument);
  // Offsets that push a partial below its predecessor degenerate the order.
  CHECK_THROWS_AS(frequencies_from_law(OffsetLaw{0.1, {0.0, -0.15}}, 2),
                  std::invalid_argument);
}

TEST_CASE("noise-free synthesis matches the defining sum") {
  SUBCASE("single partial at quarter band") {
    TrueSignalSpec spec({1.0}, {0.0}, {std::numbers::pi / 2.0}, 0.0);
    const auto x = synthesize_true(spec, 4);
    REQUIRE(x.size() == 4);
    CHECK(std::abs(x[0] - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(x[1] - Complex{0.0, 1.0}) < 1e-15);
    CHECK(std::abs(x[2] - Complex{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(x[3] - Complex{0.0, -1.0}) < 1e-15);
  }

  SUBCASE("reference configuration against a direct loop") {
    const auto spec = testutil::reference_spec(1e-4, 10.0);
    const std::size_t n = 128;
    const auto x = synthesize_true(spec, n);
    for (std::size_t t = 0; t < n; ++t) {
      Complex acc{0.0, 0.0};
      for (std::size_t k = 0; k < spec.component_count(); ++k) {
        acc += spec.amplitudes()[k] *
               std::polar(1.0, spec.phases()[k] +
                                   spec.frequencies()[k] * static_cast<double>(t));
      }
      CHECK(std::abs(x[t] - acc) < 1e-12);
    }
  }

  SUBCASE("waveforms add across component splits") {
    TrueSignalSpec both({1.0, 0.5}, {0.3, 1.1}, {0.2, 0.45}, 0.0);
    TrueSignalSpec first({1.0}, {0.3}, {0.2}, 0.0);
    TrueSignalSpec second({0.5}, {1.1}, {0.45}, 0.0);
    const auto xb = synthesize_true(both, 64);
    const auto x1 = synthesize_true(first, 64);
    const auto x2 = synthesize_true(second, 64);
    for (std::size_t t = 0; t < 64; ++t) {
      CHECK(std::abs(xb[t] - (x1[t] + x2[t])) < 1e-12);
    }
  }
}

TEST_CASE("signal power matches the amplitude sum of squares") {
  const auto spec = testutil::reference_spec(1e-4, 10.0);
  double expected = 0.0;
  for (double r : spec.amplitudes()) expected += r * r;
  CHECK(spec.signal_power() == doctest::Approx(expected).epsilon(1e-15));

  // Mean sample power of the clean waveform approaches the same number.
  const std::size_t n = 4096;
  const auto x = synthesize_true(spec, n);
  double mean_power = 0.0;
  for (const Complex& v : x) mean_power += std::norm(v);
  mean_power /= static_cast<double>(n);
  CHECK(testutil::rel_err(mean_power, expected) < 0.05);
}

TEST_CASE("noise draws carry the requested variance and reproduce bitwise") {
  TrueSignalSpec clean({1.0}, {0.2}, {0.6}, 0.0);
  TrueSignalSpec noisy({1.0}, {0.2}, {0.6}, 0.25);
  const std::size_t n = 100000;
  const auto x0 = synthesize_true(clean, n);
  const auto x1 = synthesize_true(noisy, n, std::uint64_t{7});
  double mean_sq = 0.0;
  for (std::size_t t = 0; t < n; ++t) mean_sq += std::norm(x1[t] - x0[t]);
  mean_sq /= static_cast<double>(n);
  CHECK(testutil::rel_err(mean_sq, 0.25) < 0.02);

  const auto x1_again = synthesize_true(noisy, n, std::uint64_t{7});
  const auto x2 = synthesize_true(noisy, n, std::uint64_t{8});
  bool identical = true;
  bool differs = false;
  for (std::size_t t = 0; t < n; ++t) {
    identical = identical && x1[t] == x1_again[t];
    differs = differs || x1[t] != x2[t];
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("harmonic model synthesis matches the defining sum") {
  HarmonicParams params(0.07, {0.4, 1.3, 2.2}, {1.0, 0.6, 0.3});
  const auto x = synthesize_model(params, 96);
  REQUIRE(x.size() == 96);
  for (std::size_t t = 0; t < 96; ++t) {
    CHECK(std::abs(x[t] - model_sample(params, static_cast<double>(t))) <
          1e-12);
  }

  // A harmonic truth and the model at the same point produce one waveform.
  const std::size_t k_count = 5;
  const auto amps = testutil::bell_amplitudes(k_count);
  const auto phases = testutil::draw_phases(k_count, 42);
  const auto freqs =
      frequencies_from_law(StiffnessLaw{0.07853981633974483, 0.0}, k_count);
  TrueSignalSpec spec(amps, phases, freqs, 0.0);
  HarmonicParams point(0.07853981633974483, phases, amps);
  const auto xt = synthesize_true(spec, 200);
  const auto xm = synthesize_model(point, 200);
  for (std::size_t t = 0; t < 200; ++t) {
    CHECK(std::abs(xt[t] - xm[t]) < 1e-12);
  }
}

TEST_CASE("model gradient has the closed form at t=0 for one harmonic") {
  HarmonicParams params(0.3, {0.0}, {1.0});
  const auto g = model_gradient(params, 0.0);
  REQUIRE(g.size() == 3);
  CHECK(std::abs(g(0) - Complex{0.0, 0.0}) < 1e-15);  // omega enters via t
  CHECK(std::abs(g(1) - Complex{0.0, 1.0}) < 1e-15);
  CHECK(std::abs(g(2) - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("gradient and hessian match central differences") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t k_count = 2 + static_cast<std::size_t>(trial % 3);
    std::vector<double> phases(k_count), amps(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      phases[k] = rng.uniform_angle();
      amps[k] = 0.5 + rng.uniform();
    }
    const double omega = 0.05 + 0.1 * rng.uniform();
    HarmonicParams params(omega, phases, amps);
    const auto flat = params.to_vector();
    const std::size_t dim = flat.size();

    for (double t : {0.0, 7.0, 31.0}) {
      const auto g = model_gradient(params, t);
      const auto h = model_hessian(params, t);
      REQUIRE(g.size() == static_cast<Eigen::Index>(dim));
      REQUIRE(h.rows() == static_cast<Eigen::Index>(dim));

      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      // Nuisance parameters of different harmonics only couple through omega.
      for (std::size_t k = 1; k <= k_count; ++k) {
        for (std::size_t j = 1; j <= k_count; ++j) {
          if (k == j) continue;
          CHECK(std::abs(h(HarmonicParams::phase_index(k),
                           params.amplitude_index(j))) < 1e-15);
          CHECK(std::abs(h(HarmonicParams::phase_index(k),
                           HarmonicParams::phase_index(j))) < 1e-15);
          CHECK(std::abs(h(params.amplitude_index(k),
                           params.amplitude_index(j))) < 1e-15);
        }
      }

      const double scale_g = g.cwiseAbs().maxCoeff();
      const double scale_h = h.cwiseAbs().maxCoeff();
      for (std::size_t i = 0; i < dim; ++i) {
        const double h_step = 1e-6 * std::max(1.0, std::abs(flat[i]));
        auto plus = flat, minus = flat;
        plus[i] += h_step;
        minus[i] -= h_step;
        const auto pp = HarmonicParams::from_vector(plus);
        const auto pm = HarmonicParams::from_vector(minus);

        const Complex fd_g =
            (model_sample(pp, t) - model_sample(pm, t)) / (2.0 * h_step);
        CHECK(std::abs(g(static_cast<Eigen::Index>(i)) - fd_g) <
              1e-5 * std::max(scale_g, 1.0));

        const auto fd_h =
            ((model_gradient(pp, t) - model_gradient(pm, t)) / (2.0 * h_step))
                .eval();
        for (std::size_t j = 0; j < dim; ++j) {
          CHECK(std::abs(h(static_cast<Eigen::Index>(j),
                           static_cast<Eigen::Index>(i)) -
                         fd_h(static_cast<Eigen::Index>(j))) <
                1e-4 * std::max(scale_h, 1.0));
        }
      }
    }
  }
}

TEST_CASE("rng streams are deterministic and seed derivation separates them") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 32; ++i) {
    const double va = a.normal();
    CHECK(va == b.normal());
    CHECK(va != c.normal());
  }
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));

  // Total variance of the circular complex draw.
  Rng r(5);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += std::norm(r.complex_normal(2.0));
  CHECK(testutil::rel_err(acc / n, 2.0) < 0.02);
}

TEST_CASE("angle helpers wrap and measure circular distance") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kTwoPi + 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5).epsilon(1e-12));
  CHECK(circular_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(circular_distance(1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("spec and parameter validation reject malformed input") {
  CHECK_THROWS_AS(TrueSignalSpec({}, {}, {}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TrueSignalSpec({1.0}, {0.0}, {0.5, 0.6}, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrueSignalSpec({1.0, 1.0}, {0.0, 0.0}, {0.5, 0.5}, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrueSignalSpec({1.0}, {0.0}, {0.5}, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrueSignalSpec({-1.0}, {0.0}, {0.5}, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(HarmonicParams(-0.1, {0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(HarmonicParams(0.1, {0.0, 0.0}, {1.0}),
                  std::invalid_argument);

  HarmonicParams params(0.1, {0.3, 0.4}, {1.0, 0.5});
  const auto flat = params.to_vector();
  REQUIRE(flat.size() == 5);
  const auto back = HarmonicParams::from_vector(flat);
  CHECK(back.omega() == params.omega());
  CHECK(back.phases() == params.phases());
  CHECK(back.amplitudes() == params.amplitudes());
  CHECK_THROWS_AS(HarmonicParams::from_vector({0.1, 0.2}),
                  std::invalid_argument);
}
