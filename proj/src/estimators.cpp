#include "inharmonica/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "inharmonica/model.hpp"
#include "inharmonica/projection.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/threading.hpp"

namespace inharmonica {

HarmonicEstimate harmonic_mle(const ComplexSeries& series, std::size_t k_count,
                              const SearchConfig& search) {
  const detail::HarmonicFit fit =
      detail::fit_harmonic_series(series, k_count, search);
  return HarmonicEstimate{
      detail::params_from_fit(fit),
      fit.residual_energy / static_cast<double>(series.size()),
      fit.converged, fit.iterations};
}

namespace {

constexpr double kGolden = 0.6180339887498949;

// Best frequency for component j with the others held fixed; all amplitudes
// are re-solved jointly for every candidate. A coarse scan locates the basin
// (the window can span a sidelobe), golden section polishes it.
double refine_coordinate(const ComplexSeries& series,
                         std::vector<double>& freqs, std::size_t j, double lo,
                         double hi, double tolerance,
                         detail::ProjectionScratch& scratch,
                         double* best_value, bool* pinned) {
  auto evaluate = [&](double nu) {
    const double saved = freqs[j];
    freqs[j] = nu;
    const double value =
        detail::project_frequencies(series, freqs, scratch, true)
            .residual_energy;
    freqs[j] = saved;
    return value;
  };
  auto derivative = [&](double nu) {
    const double saved = freqs[j];
    freqs[j] = nu;
    const double slope =
        detail::frequency_residual_derivative(series, freqs, j, scratch,
                                              nullptr);
    freqs[j] = saved;
    return slope;
  };

  constexpr std::size_t kScan = 24;
  double best_nu = freqs[j];
  double best = evaluate(best_nu);
  const double step = (hi - lo) / static_cast<double>(kScan);
  for (std::size_t i = 0; i <= kScan; ++i) {
    const double nu = lo + static_cast<double>(i) * step;
    const double value = evaluate(nu);
    if (value < best) {
      best = value;
      best_nu = nu;
    }
  }

  double a = std::max(lo, best_nu - step);
  double b = std::min(hi, best_nu + step);
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = evaluate(x1);
  double f2 = evaluate(x2);
  auto track = [&](double nu, double value) {
    if (value < best) {
      best = value;
      best_nu = nu;
    }
  };
  track(x1, f1);
  track(x2, f2);
  while (b - a > std::max(tolerance, 1e-7)) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = evaluate(x1);
      track(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = evaluate(x2);
      track(x2, f2);
    }
  }
  // Residual differences below evaluation noise cannot steer golden section
  // any further; the derivative sign still can, so bisect on it down to the
  // representable floor (see frequency_residual_derivative).
  try {
    if (b - a > 0.0 && derivative(a) < 0.0 && derivative(b) > 0.0) {
      double lo = a;
      double hi = b;
      for (std::size_t i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double dm = derivative(mid);
        if (dm == 0.0) {
          lo = mid;
          hi = mid;
          break;
        }
        if (dm < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double root = lo == hi ? lo : 0.5 * (lo + hi);
      *best_value = evaluate(root);
      *pinned = true;
      return root;
    }
  } catch (const NumericalError&) {
    // degenerate atoms at a bracket end; keep the value-based result
  }
  while (b - a > tolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = evaluate(x1);
      track(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = evaluate(x2);
      track(x2, f2);
    }
  }
  *best_value = best;
  return best_nu;
}

}  // namespace

UnstructuredEstimate unstructured_mle(const ComplexSeries& series,
                                      const std::vector<double>& initial_freqs,
                                      const UnstructuredOptions& options) {
  const std::size_t n = series.size();
  const std::size_t k_count = initial_freqs.size();
  if (k_count == 0) throw std::invalid_argument("need at least one frequency");
  if (n < 2 * k_count + 1) {
    throw std::invalid_argument(
        "need at least 2K+1 samples to identify K sinusoids");
  }
  double prev_nu = 0.0;
  for (double nu : initial_freqs) {
    if (!(nu > prev_nu) || !(nu < std::numbers::pi)) {
      throw std::invalid_argument(
          "initial frequencies must be ascending within (0, pi)");
    }
    prev_nu = nu;
  }

  const double halfwidth = options.search_halfwidth > 0.0
                               ? options.search_halfwidth
                               : 3.0 * std::numbers::pi /
                                     static_cast<double>(n);
  const double collision = std::numbers::pi / (4.0 * static_cast<double>(n));

  std::vector<double> freqs = initial_freqs;
  detail::ProjectionScratch scratch;
  double residual =
      detail::project_frequencies(series, freqs, scratch, true)
          .residual_energy;

  UnstructuredEstimate out;
  out.converged = false;
  std::size_t sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    const double sweep_start = residual;
    for (std::size_t j = 0; j < k_count; ++j) {
      // Keep the components ordered: never let a line search cross the
      // midpoint toward a neighbour.
      const double lo =
          j == 0 ? std::max(collision, freqs[j] - halfwidth)
                 : std::max(0.5 * (freqs[j - 1] + freqs[j]),
                            freqs[j] - halfwidth);
      const double hi =
          j + 1 == k_count
              ? std::min(std::numbers::pi - collision, freqs[j] + halfwidth)
              : std::min(0.5 * (freqs[j] + freqs[j + 1]),
                         freqs[j] + halfwidth);
      if (!(lo < hi)) continue;
      double value = residual;
      bool pinned = false;
      const double nu = refine_coordinate(series, freqs, j, lo, hi,
                                          options.frequency_tolerance, scratch,
                                          &value, &pinned);
      // A pinned root is the coordinate minimizer to machine precision, so
      // take it even when the value comparison drowns in evaluation noise.
      if (pinned || value <= residual) {
        freqs[j] = nu;
        residual = value;
      }
    }

    bool collided = false;
    for (std::size_t j = 1; j < k_count; ++j) {
      if (freqs[j] - freqs[j - 1] < collision) collided = true;
    }
    if (collided) {
      out.converged = false;
      ++sweep;
      break;
    }

    const double updated =
        detail::project_frequencies(series, freqs, scratch, true)
            .residual_energy;
    residual = updated;
    // Progress across the whole sweep, not against the re-evaluation of the
    // final point: coordinate descent needs several sweeps to untangle
    // coupled frequencies.
    if (std::abs(sweep_start - updated) <=
        options.relative_tolerance * std::max(updated, 1e-300)) {
      out.converged = true;
      ++sweep;
      break;
    }
  }

  const detail::Projection final_fit =
      detail::project_frequencies(series, freqs, scratch, true);
  out.params.frequencies = freqs;
  out.params.amplitudes.resize(k_count);
  out.params.phases.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Complex c = final_fit.amplitudes(static_cast<Eigen::Index>(k));
    out.params.amplitudes[k] = std::abs(c);
    out.params.phases[k] = wrap_angle(std::arg(c));
  }
  out.residual_variance =
      final_fit.residual_energy / static_cast<double>(n);
  out.sweeps = sweep;
  return out;
}

std::vector<ConsistencyRow> asymptotic_mle_consistency_check(
    const TrueSignalSpec& spec, const std::vector<std::size_t>& n_values,
    std::size_t trials, std::uint64_t seed, const SearchConfig& search) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  SearchConfig effective = search;
  if (effective.omega_hint <= 0.0 &&
      effective.window_hi <= effective.window_lo) {
    effective.omega_hint = spec.frequencies().front();
  }

  std::vector<ConsistencyRow> rows;
  rows.reserve(n_values.size());
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    const std::size_t n = n_values[ni];
    const PseudoTrueResult pt = solve_pseudo_true(spec, n, effective);

    std::vector<double> estimates(trials,
                                  std::numeric_limits<double>::quiet_NaN());
    std::vector<char> ok(trials, 0);
    parallel_for(trials, 0, [&](std::size_t trial) {
      Rng rng(derive_seed(seed, ni, trial));
      const ComplexSeries y = synthesize_true(spec, n, rng);
      const HarmonicEstimate fit =
          harmonic_mle(y, spec.component_count(), effective);
      estimates[trial] = fit.params.omega();
      ok[trial] = fit.converged ? 1 : 0;
    });

    ConsistencyRow row;
    row.n_samples = n;
    row.omega0 = pt.params.omega();
    double sum = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      if (ok[i]) {
        sum += estimates[i];
        ++row.n_converged;
      }
    }
    if (row.n_converged > 0) {
      row.mean_estimate = sum / static_cast<double>(row.n_converged);
      double ss = 0.0;
      for (std::size_t i = 0; i < trials; ++i) {
        if (!ok[i]) continue;
        const double d = estimates[i] - row.mean_estimate;
        ss += d * d;
      }
      const double variance = ss / static_cast<double>(row.n_converged);
      row.standard_error =
          std::sqrt(variance / static_cast<double>(row.n_converged));
      row.mean_abs_gap = std::abs(row.mean_estimate - row.omega0);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace inharmonica
