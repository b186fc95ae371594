#include "inharmonica/montecarlo.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "inharmonica/bounds.hpp"
#include "inharmonica/estimators.hpp"
#include "inharmonica/format.hpp"
#include "inharmonica/model.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/threading.hpp"

namespace inharmonica {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Inharmonicity: return "beta";
    case SweepAxis::SampleCount: return "n";
    case SweepAxis::Snr: return "snr_db";
  }
  throw std::invalid_argument("unknown sweep axis");
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "beta") return SweepAxis::Inharmonicity;
  if (name == "n") return SweepAxis::SampleCount;
  if (name == "snr_db") return SweepAxis::Snr;
  throw std::invalid_argument("unknown sweep axis '" + name +
                              "' (expected beta, n or snr_db)");
}

std::vector<double> default_amplitude_profile(std::size_t k_count) {
  std::vector<double> amps(k_count);
  const double centre = static_cast<double>(k_count) / 2.0;
  for (std::size_t k = 1; k <= k_count; ++k) {
    const double d = static_cast<double>(k) - centre;
    amps[k - 1] = std::exp(-d * d / 20.0);
  }
  return amps;
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Seed streams per axis value: trials, the fixed phase draw, bound draws.
enum StreamKind : std::uint64_t { kTrialStream = 0, kPhaseStream = 1, kBoundStream = 2 };

std::uint64_t cell_stream(std::size_t axis_index, StreamKind kind) {
  return static_cast<std::uint64_t>(axis_index) * 4 + kind;
}

std::vector<double> draw_phases(Rng& rng, std::size_t k_count) {
  std::vector<double> phases(k_count);
  for (double& p : phases) p = rng.uniform_angle();
  return phases;
}

struct CellSetting {
  double beta = 0.0;
  std::size_t n_samples = 0;
  double noise_variance = 0.0;
  std::vector<double> frequencies;
};

struct BoundValues {
  double mse_lb = 0.0;
  double mcrlb_exact = 0.0;
  double mcrlb_asymp = 0.0;
  double crlb_sine = 0.0;
  double crlb_harmonic = 0.0;
};

BoundValues bounds_for_phases(const std::vector<double>& amplitudes,
                              const std::vector<double>& phases,
                              const CellSetting& setting,
                              const SearchConfig& search) {
  const TrueSignalSpec spec(amplitudes, phases, setting.frequencies,
                            setting.noise_variance);
  const PseudoTrueResult pt =
      solve_pseudo_true(spec, setting.n_samples, search);
  const SandwichMatrices matrices =
      build_sandwich(pt.params, spec, setting.n_samples);
  const Eigen::VectorXd exact = mcrlb_exact(matrices);
  const AsymptoticBound asymp =
      mcrlb_asymptotic(pt.params, spec, setting.n_samples);

  BoundValues out;
  out.mcrlb_exact = exact(0);
  out.mcrlb_asymp = asymp.value;
  out.crlb_harmonic = setting.noise_variance / asymp.terms.curvature;
  out.crlb_sine = crlb_unstructured(spec, setting.n_samples)(0);
  const double bias1 = asymp.terms.freq_offsets.front();
  out.mse_lb = bias1 * bias1 + out.mcrlb_exact;
  return out;
}

struct TrialStats {
  double mse = kNan;
  double var = kNan;
  double bias_sq = kNan;
  std::size_t n_converged = 0;
};

TrialStats reduce_trials(const std::vector<double>& estimates,
                         const std::vector<char>& converged, double truth) {
  TrialStats stats;
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (converged[i]) {
      sum += estimates[i];
      ++stats.n_converged;
    }
  }
  if (stats.n_converged == 0) return stats;
  const double count = static_cast<double>(stats.n_converged);
  const double mean = sum / count;
  double mse = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!converged[i]) continue;
    const double err = estimates[i] - truth;
    const double dev = estimates[i] - mean;
    mse += err * err;
    var += dev * dev;
  }
  stats.mse = mse / count;
  stats.var = var / count;
  const double bias = mean - truth;
  stats.bias_sq = bias * bias;
  return stats;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  if (config.harmonic_count == 0) {
    throw std::invalid_argument("harmonic_count must be >= 1");
  }
  if (!(config.omega > 0.0)) {
    throw std::invalid_argument("omega must be positive");
  }
  std::vector<double> amplitudes =
      config.amplitudes.empty() ? default_amplitude_profile(config.harmonic_count)
                                : config.amplitudes;
  if (amplitudes.size() != config.harmonic_count) {
    throw std::invalid_argument("amplitude profile length must equal K");
  }
  double power = 0.0;
  for (double r : amplitudes) power += r * r;

  SearchConfig search = config.search;
  if (search.omega_hint <= 0.0 && search.window_hi <= search.window_lo) {
    search.omega_hint = config.omega;
  }

  SweepResult result;
  result.config = config;
  result.amplitudes = amplitudes;
  result.cells.reserve(config.axis_values.size());

  for (std::size_t i = 0; i < config.axis_values.size(); ++i) {
    const double value = config.axis_values[i];
    SweepCell cell;
    cell.axis_value = value;
    cell.mse_lb = cell.mcrlb_exact = cell.mcrlb_asymp = kNan;
    cell.crlb_sine = cell.crlb_harmonic = kNan;
    cell.mse_empirical = cell.var_empirical = cell.bias_sq = kNan;
    cell.mse_unstructured = cell.var_unstructured =
        cell.bias_sq_unstructured = kNan;

    CellSetting setting;
    setting.beta =
        config.axis == SweepAxis::Inharmonicity ? value : config.beta;
    double snr_db = config.axis == SweepAxis::Snr ? value : config.snr_db;
    if (config.axis == SweepAxis::SampleCount) {
      if (!(value > 0.0) || value != std::floor(value)) {
        cell.bound_error = "sample-count axis values must be positive integers";
        result.cells.push_back(std::move(cell));
        continue;
      }
      setting.n_samples = static_cast<std::size_t>(value);
    } else {
      setting.n_samples = config.n_samples;
    }
    setting.noise_variance = power / std::pow(10.0, snr_db / 10.0);
    try {
      setting.frequencies = frequencies_from_law(
          StiffnessLaw{config.omega, setting.beta}, config.harmonic_count);
    } catch (const std::exception& err) {
      cell.bound_error = err.what();
      result.cells.push_back(std::move(cell));
      continue;
    }

    std::vector<double> fixed_phases;
    if (!config.redraw_phases) {
      Rng rng(derive_seed(config.seed, cell_stream(i, kPhaseStream), 0));
      fixed_phases = draw_phases(rng, config.harmonic_count);
    }

    // Bound curves: one evaluation in fixed mode, an average over independent
    // draws under the redraw protocol.
    try {
      if (config.redraw_phases) {
        if (config.bound_phase_draws == 0) {
          throw std::invalid_argument("bound_phase_draws must be >= 1");
        }
        BoundValues mean;
        for (std::size_t d = 0; d < config.bound_phase_draws; ++d) {
          Rng rng(derive_seed(config.seed, cell_stream(i, kBoundStream), d));
          const BoundValues one = bounds_for_phases(
              amplitudes, draw_phases(rng, config.harmonic_count), setting,
              search);
          mean.mse_lb += one.mse_lb;
          mean.mcrlb_exact += one.mcrlb_exact;
          mean.mcrlb_asymp += one.mcrlb_asymp;
          mean.crlb_sine += one.crlb_sine;
          mean.crlb_harmonic += one.crlb_harmonic;
        }
        const double scale = 1.0 / static_cast<double>(config.bound_phase_draws);
        cell.mse_lb = mean.mse_lb * scale;
        cell.mcrlb_exact = mean.mcrlb_exact * scale;
        cell.mcrlb_asymp = mean.mcrlb_asymp * scale;
        cell.crlb_sine = mean.crlb_sine * scale;
        cell.crlb_harmonic = mean.crlb_harmonic * scale;
      } else {
        const BoundValues one =
            bounds_for_phases(amplitudes, fixed_phases, setting, search);
        cell.mse_lb = one.mse_lb;
        cell.mcrlb_exact = one.mcrlb_exact;
        cell.mcrlb_asymp = one.mcrlb_asymp;
        cell.crlb_sine = one.crlb_sine;
        cell.crlb_harmonic = one.crlb_harmonic;
      }
    } catch (const std::exception& err) {
      cell.bound_error = err.what();
    }

    // Monte Carlo trials.
    const double truth = setting.frequencies.front();
    std::vector<double> estimates(config.trials, kNan);
    std::vector<char> converged(config.trials, 0);
    std::vector<double> estimates_unstructured;
    std::vector<char> converged_unstructured;
    if (config.run_unstructured) {
      estimates_unstructured.assign(config.trials, kNan);
      converged_unstructured.assign(config.trials, 0);
    }

    parallel_for(config.trials, config.max_threads, [&](std::size_t trial) {
      Rng rng(derive_seed(config.seed, cell_stream(i, kTrialStream), trial));
      const std::vector<double> phases =
          config.redraw_phases ? draw_phases(rng, config.harmonic_count)
                               : fixed_phases;
      const TrueSignalSpec spec(amplitudes, phases, setting.frequencies,
                                setting.noise_variance);
      const ComplexSeries y = synthesize_true(spec, setting.n_samples, rng);
      try {
        const HarmonicEstimate fit =
            harmonic_mle(y, config.harmonic_count, search);
        estimates[trial] = fit.params.omega();
        converged[trial] = fit.converged ? 1 : 0;
      } catch (const NumericalError&) {
        converged[trial] = 0;
      }
      if (config.run_unstructured) {
        try {
          const UnstructuredEstimate fit =
              unstructured_mle(y, setting.frequencies);
          estimates_unstructured[trial] = fit.params.frequencies.front();
          converged_unstructured[trial] = fit.converged ? 1 : 0;
        } catch (const NumericalError&) {
          converged_unstructured[trial] = 0;
        }
      }
    });

    const TrialStats stats = reduce_trials(estimates, converged, truth);
    cell.mse_empirical = stats.mse;
    cell.var_empirical = stats.var;
    cell.bias_sq = stats.bias_sq;
    cell.n_converged = stats.n_converged;
    if (config.run_unstructured) {
      const TrialStats ustats = reduce_trials(estimates_unstructured,
                                              converged_unstructured, truth);
      cell.mse_unstructured = ustats.mse;
      cell.var_unstructured = ustats.var;
      cell.bias_sq_unstructured = ustats.bias_sq;
      cell.n_converged_unstructured = ustats.n_converged;
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

namespace {

constexpr const char* kFigureHeader =
    "axis_value,mse_empirical,var_empirical,bias_sq,mse_lb,mcrlb_exact,"
    "mcrlb_asymp,crlb_sine,crlb_harmonic,n_converged\n";

void write_figure_rows(std::ostream& out, const SweepResult& result,
                       bool unstructured) {
  using detail::format_full;
  out << kFigureHeader;
  for (const SweepCell& cell : result.cells) {
    const double mse = unstructured ? cell.mse_unstructured : cell.mse_empirical;
    const double var = unstructured ? cell.var_unstructured : cell.var_empirical;
    const double bias_sq =
        unstructured ? cell.bias_sq_unstructured : cell.bias_sq;
    const std::size_t n_conv =
        unstructured ? cell.n_converged_unstructured : cell.n_converged;
    out << format_full(cell.axis_value) << ',' << format_full(mse) << ','
        << format_full(var) << ',' << format_full(bias_sq) << ','
        << format_full(cell.mse_lb) << ',' << format_full(cell.mcrlb_exact)
        << ',' << format_full(cell.mcrlb_asymp) << ','
        << format_full(cell.crlb_sine) << ','
        << format_full(cell.crlb_harmonic) << ',' << n_conv << '\n';
  }
}

}  // namespace

void emit_figure_data(const SweepResult& result,
                      const std::filesystem::path& csv_path) {
  {
    std::ofstream out(csv_path);
    if (!out) {
      throw std::runtime_error("cannot open " + csv_path.string() +
                               " for writing");
    }
    write_figure_rows(out, result, false);
  }
  if (result.config.run_unstructured) {
    std::filesystem::path sibling = csv_path;
    sibling.replace_filename(csv_path.stem().string() + "_unstructured" +
                             csv_path.extension().string());
    std::ofstream out(sibling);
    if (!out) {
      throw std::runtime_error("cannot open " + sibling.string() +
                               " for writing");
    }
    write_figure_rows(out, result, true);
  }
}

SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("bad sweep config JSON: ") +
                                err.what());
  }
  SweepConfig config;
  try {
    config.axis = sweep_axis_from_string(doc.at("axis").get<std::string>());
    config.axis_values = doc.at("values").get<std::vector<double>>();
    config.beta = doc.value("beta", config.beta);
    config.n_samples = doc.value("n", config.n_samples);
    config.snr_db = doc.value("snr_db", config.snr_db);
    config.trials = doc.value("trials", config.trials);
    config.harmonic_count = doc.value("harmonics", config.harmonic_count);
    config.omega = doc.value("omega", config.omega);
    if (doc.contains("amplitudes")) {
      config.amplitudes = doc.at("amplitudes").get<std::vector<double>>();
    }
    const std::string mode = doc.value("phase_mode", std::string("redraw"));
    if (mode == "redraw") {
      config.redraw_phases = true;
    } else if (mode == "fixed") {
      config.redraw_phases = false;
    } else {
      throw std::invalid_argument("phase_mode must be 'redraw' or 'fixed'");
    }
    config.bound_phase_draws =
        doc.value("bound_phase_draws", config.bound_phase_draws);
    config.run_unstructured =
        doc.value("run_unstructured", config.run_unstructured);
    config.seed = doc.value("seed", config.seed);
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("bad sweep config: ") +
                                err.what());
  }
  return config;
}

std::string sweep_config_to_json(const SweepConfig& config) {
  nlohmann::json doc;
  doc["axis"] = to_string(config.axis);
  doc["values"] = config.axis_values;
  doc["beta"] = config.beta;
  doc["n"] = config.n_samples;
  doc["snr_db"] = config.snr_db;
  doc["trials"] = config.trials;
  doc["harmonics"] = config.harmonic_count;
  doc["omega"] = config.omega;
  if (!config.amplitudes.empty()) doc["amplitudes"] = config.amplitudes;
  doc["phase_mode"] = config.redraw_phases ? "redraw" : "fixed";
  doc["bound_phase_draws"] = config.bound_phase_draws;
  doc["run_unstructured"] = config.run_unstructured;
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

}  // namespace inharmonica
