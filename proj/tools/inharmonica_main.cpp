#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inharmonica/bounds.hpp"
#include "inharmonica/format.hpp"
#include "inharmonica/model.hpp"
#include "inharmonica/montecarlo.hpp"
#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/rng.hpp"
#include "inharmonica/speech.hpp"
#include "inharmonica/threading.hpp"
#include "inharmonica/types.hpp"
#include "inharmonica/wav.hpp"
#include "manifest.hpp"

#ifndef INHARMONICA_VERSION
#define INHARMONICA_VERSION "0.0.0"
#endif

namespace {

using namespace inharmonica;

std::vector<double> parse_double_list(const std::string& text,
                                      const char* flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      while (used < item.size() &&
             std::isspace(static_cast<unsigned char>(item[used])) != 0) {
        ++used;
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  if (values.empty()) {
    throw CLI::ValidationError(flag, "expected a comma-separated number list");
  }
  return values;
}

std::string joined_command(int argc, char** argv) {
  std::string text;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) text += ' ';
    text += argv[i];
  }
  return text;
}

// Output names are built as stem + suffix; accept stems that already carry
// the extension so `--out results.csv` does not produce results.csv.csv.
std::string strip_output_extension(std::string stem) {
  for (const char* ext : {".csv", ".jsonl", ".json"}) {
    const std::string_view suffix(ext);
    if (stem.size() > suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) ==
            0) {
      stem.erase(stem.size() - suffix.size());
      break;
    }
  }
  return stem;
}

// Frequencies arrive in rad/sample, or in Hz when a sample rate is given.
double to_rad_per_sample(double value, std::optional<double> sample_rate) {
  if (!sample_rate) return value;
  return kTwoPi * value / *sample_rate;
}

struct BoundsArgs {
  std::size_t k_count = 0;
  double omega = 0.0;
  std::optional<double> sample_rate;
  double beta = 0.0;
  std::string offsets_text;
  std::size_t n_samples = 200;
  double snr_db = 10.0;
  std::optional<double> sigma2;
  std::string amplitudes_text;
  std::string phases_text;
  std::uint64_t seed = 1;
  bool decoupled_sine = false;
  std::string json_path;
  std::string csv_path;
  SearchConfig search;
  double omega_hint = 0.0;
};

TrueSignalSpec spec_from_bounds_args(const BoundsArgs& args,
                                     nlohmann::json* snapshot) {
  const double omega = to_rad_per_sample(args.omega, args.sample_rate);
  InharmonicityLaw law = StiffnessLaw{omega, args.beta};
  if (!args.offsets_text.empty()) {
    auto offsets = parse_double_list(args.offsets_text, "--offsets");
    if (offsets.size() != args.k_count) {
      throw std::invalid_argument("--offsets needs exactly K values");
    }
    for (double& d : offsets) d = to_rad_per_sample(d, args.sample_rate);
    law = OffsetLaw{omega, offsets};
  }
  auto frequencies = frequencies_from_law(law, args.k_count);

  std::vector<double> amplitudes;
  if (args.amplitudes_text.empty()) {
    amplitudes = default_amplitude_profile(args.k_count);
  } else {
    amplitudes = parse_double_list(args.amplitudes_text, "--amplitudes");
    if (amplitudes.size() != args.k_count) {
      throw std::invalid_argument("--amplitudes needs exactly K values");
    }
  }

  std::vector<double> phases;
  if (args.phases_text.empty()) {
    Rng rng(args.seed);
    phases.resize(args.k_count);
    for (double& p : phases) p = rng.uniform_angle();
  } else {
    phases = parse_double_list(args.phases_text, "--phases");
    if (phases.size() != args.k_count) {
      throw std::invalid_argument("--phases needs exactly K values");
    }
  }

  double power = 0.0;
  for (double r : amplitudes) power += r * r;
  const double noise_variance =
      args.sigma2 ? *args.sigma2 : power / std::pow(10.0, args.snr_db / 10.0);

  if (snapshot != nullptr) {
    auto& doc = *snapshot;
    doc["harmonics"] = args.k_count;
    doc["omega"] = omega;
    if (args.offsets_text.empty()) {
      doc["beta"] = args.beta;
    } else {
      doc["offsets"] = std::get<OffsetLaw>(law).offsets;
    }
    doc["n"] = args.n_samples;
    doc["noise_variance"] = noise_variance;
    doc["amplitudes"] = amplitudes;
    doc["phases"] = phases;
    doc["seed"] = args.seed;
    doc["decoupled_sine"] = args.decoupled_sine;
  }
  return TrueSignalSpec(amplitudes, phases, frequencies, noise_variance);
}

void print_bound_report(const BoundReport& report) {
  std::printf("%-22s %zu\n", "n_samples", report.n_samples);
  std::printf("%-22s %zu\n", "harmonics", report.harmonic_count);
  std::printf("%-22s %.10e\n", "noise_variance", report.noise_variance);
  std::printf("%-22s %.10e\n", "omega0", report.omega0);
  std::printf("%-22s %.10e\n", "pseudo_variance", report.pseudo_variance);
  std::printf("%-22s %.10e\n", "mcrlb_exact_omega", report.mcrlb_exact_omega);
  std::printf("%-22s %.10e\n", "mcrlb_asymp_omega", report.mcrlb_asymp_omega);
  std::printf("%-22s %.10e\n", "crlb_harmonic_omega",
              report.crlb_harmonic_omega);
  std::printf("%3s %16s %16s %16s\n", "k", "bias_k", "mse_lb_k",
              "crlb_sine_k");
  for (std::size_t k = 0; k < report.harmonic_count; ++k) {
    std::printf("%3zu %16.8e %16.8e %16.8e\n", k + 1, report.bias[k],
                report.mse_lb[k], report.crlb_sine[k]);
  }
}

int run_bounds(const BoundsArgs& args, const std::string& command) {
  nlohmann::json snapshot;
  const auto spec = spec_from_bounds_args(args, &snapshot);
  SearchConfig search = args.search;
  if (args.omega_hint > 0.0) {
    search.omega_hint = to_rad_per_sample(args.omega_hint, args.sample_rate);
  }
  const auto report =
      compute_bound_report(spec, args.n_samples, search, args.decoupled_sine);
  print_bound_report(report);

  std::vector<std::filesystem::path> outputs;
  if (!args.json_path.empty()) {
    std::ofstream out(args.json_path);
    if (!out) throw std::runtime_error("cannot write " + args.json_path);
    out << bound_report_json(report) << '\n';
    outputs.emplace_back(args.json_path);
  }
  if (!args.csv_path.empty()) {
    std::ofstream out(args.csv_path);
    if (!out) throw std::runtime_error("cannot write " + args.csv_path);
    out << bound_report_csv(report);
    outputs.emplace_back(args.csv_path);
  }
  if (!outputs.empty()) {
    cli::RunManifest manifest;
    manifest.version = INHARMONICA_VERSION;
    manifest.command = command;
    manifest.seed = args.seed;
    manifest.threads = 1;
    manifest.config = snapshot;
    manifest.outputs = outputs;
    auto manifest_path = outputs.front();
    manifest_path.replace_extension("");
    manifest_path += ".manifest.json";
    cli::write_manifest(manifest, manifest_path);
    std::printf("manifest: %s\n", manifest_path.string().c_str());
  }
  return 0;
}

struct SweepArgs {
  std::string config_path;
  std::string out_stem = "sweep";
  std::optional<std::string> axis;
  std::optional<std::string> values_text;
  std::optional<double> beta;
  std::optional<std::size_t> n_samples;
  std::optional<double> snr_db;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> k_count;
  std::optional<double> omega;
  std::optional<std::string> amplitudes_text;
  std::optional<std::string> phase_mode;
  std::optional<std::size_t> bound_draws;
  bool unstructured = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

int run_sweep(const SweepArgs& args, const std::string& command) {
  SweepConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::runtime_error("cannot read " + args.config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    config = sweep_config_from_json(buffer.str());
  }
  if (args.axis) config.axis = sweep_axis_from_string(*args.axis);
  if (args.values_text) {
    config.axis_values = parse_double_list(*args.values_text, "--values");
  }
  if (args.beta) config.beta = *args.beta;
  if (args.n_samples) config.n_samples = *args.n_samples;
  if (args.snr_db) config.snr_db = *args.snr_db;
  if (args.trials) config.trials = *args.trials;
  if (args.k_count) config.harmonic_count = *args.k_count;
  if (args.omega) config.omega = *args.omega;
  if (args.amplitudes_text) {
    config.amplitudes = parse_double_list(*args.amplitudes_text,
                                          "--amplitudes");
  }
  if (args.phase_mode) {
    if (*args.phase_mode == "redraw") {
      config.redraw_phases = true;
    } else if (*args.phase_mode == "fixed") {
      config.redraw_phases = false;
    } else {
      throw std::invalid_argument("--phase-mode must be redraw or fixed");
    }
  }
  if (args.bound_draws) config.bound_phase_draws = *args.bound_draws;
  if (args.unstructured) config.run_unstructured = true;
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.max_threads = *args.threads;
  if (config.axis_values.empty()) {
    throw std::invalid_argument(
        "no axis values: provide a config file or --values");
  }

  const auto result = inharmonica::run_sweep(config);
  for (const auto& cell : result.cells) {
    if (!cell.bound_error.empty()) {
      std::fprintf(stderr, "warning: axis value %g bounds failed: %s\n",
                   cell.axis_value, cell.bound_error.c_str());
    }
  }

  const std::string stem = strip_output_extension(args.out_stem);
  const std::filesystem::path csv_path = stem + ".csv";
  emit_figure_data(result, csv_path);
  std::vector<std::filesystem::path> outputs{csv_path};
  if (config.run_unstructured) {
    outputs.emplace_back(stem + "_unstructured.csv");
  }

  cli::RunManifest manifest;
  manifest.version = INHARMONICA_VERSION;
  manifest.command = command;
  manifest.seed = config.seed;
  manifest.threads = config.max_threads;
  manifest.config = nlohmann::json::parse(sweep_config_to_json(config));
  manifest.outputs = outputs;
  const std::filesystem::path manifest_path = stem + ".manifest.json";
  cli::write_manifest(manifest, manifest_path);

  std::printf("axis: %s, %zu cells, %zu trials each\n",
              to_string(config.axis).c_str(), result.cells.size(),
              config.trials);
  for (const auto& path : outputs) {
    std::printf("wrote: %s\n", path.string().c_str());
  }
  std::printf("manifest: %s\n", manifest_path.string().c_str());
  return 0;
}

struct SpeechArgs {
  std::string wav_path;
  std::string out_stem = "speech";
  double frame_ms = 25.6;
  std::string snr_text = "0,10";
  DetectConfig detect;
  std::size_t threads = 0;
  std::uint64_t seed = 1;
};

int run_speech(const SpeechArgs& args, const std::string& command) {
  DetectConfig config = args.detect;
  config.snr_db = parse_double_list(args.snr_text, "--snr-db");

  const auto audio = read_wav(args.wav_path);
  const auto analyses =
      analyze_buffer(audio, args.frame_ms, config, args.threads);

  const std::string stem = strip_output_extension(args.out_stem);
  const std::filesystem::path frames_path = stem + "_frames.jsonl";
  {
    std::ofstream out(frames_path);
    if (!out) throw std::runtime_error("cannot write " + frames_path.string());
    for (const auto& frame : analyses) {
      out << frame_analysis_json(frame) << '\n';
    }
  }
  std::size_t accepted = 0;
  for (const auto& frame : analyses) accepted += frame.accepted ? 1 : 0;

  const std::filesystem::path cdf_path = stem + "_cdf.csv";
  try {
    ratio_cdf(analyses, cdf_path);
  } catch (const std::runtime_error&) {
    // Zero accepted frames: the header-only CSV was still written and the
    // explanatory exit path below reports the counts.
    if (accepted != 0) throw;
  }

  cli::RunManifest manifest;
  manifest.version = INHARMONICA_VERSION;
  manifest.command = command;
  manifest.seed = args.seed;
  manifest.threads = args.threads;
  manifest.config = {
      {"wav", args.wav_path},
      {"frame_ms", args.frame_ms},
      {"snr_db", config.snr_db},
      {"threshold_db", config.threshold_db},
      {"pad_factor", config.pad_factor},
      {"max_peaks", config.max_peaks},
      {"min_components", config.min_components},
      {"max_components", config.max_components},
      {"bound_samples", config.bound_samples},
  };
  manifest.outputs = {frames_path, cdf_path};
  const std::filesystem::path manifest_path = stem + ".manifest.json";
  cli::write_manifest(manifest, manifest_path);

  std::printf("frames: %zu total, %zu accepted\n", analyses.size(), accepted);
  for (const auto& [reason, count] : rejection_histogram(analyses)) {
    std::printf("  rejected %-24s %zu\n", reason.c_str(), count);
  }
  std::printf("wrote: %s\n", frames_path.string().c_str());
  std::printf("wrote: %s\n", cdf_path.string().c_str());
  std::printf("manifest: %s\n", manifest_path.string().c_str());

  if (accepted == 0) {
    std::fprintf(stderr,
                 "error: no frame passed the acceptance rules (%zu frames "
                 "analyzed); the ratio CDF is empty. Adjust --threshold-db or "
                 "check that the audio contains voiced content.\n",
                 analyses.size());
    return 1;
  }
  return 0;
}

struct SelftestArgs {
  std::uint64_t seed = 1;
};

bool check(const char* name, bool ok, double observed, double limit) {
  std::printf("%-34s %s (observed %.3e, limit %.3e)\n", name,
              ok ? "PASS" : "FAIL", observed, limit);
  return ok;
}

int run_selftest(const SelftestArgs& args) {
  bool all_ok = true;

  {
    const std::size_t k_count = 10;
    const double omega = kTwoPi / 80.0;
    auto amplitudes = default_amplitude_profile(k_count);
    Rng rng(args.seed);
    std::vector<double> phases(k_count);
    for (double& p : phases) p = rng.uniform_angle();
    double power = 0.0;
    for (double r : amplitudes) power += r * r;
    auto frequencies =
        frequencies_from_law(StiffnessLaw{omega, 0.0}, k_count);
    TrueSignalSpec spec(amplitudes, phases, frequencies, power / 10.0);
    SearchConfig search;
    search.refine_tolerance = 1e-12;
    const auto fit = solve_pseudo_true(spec, 200, search);
    const auto sandwich = build_sandwich(fit.params, spec, 200);
    const auto exact = mcrlb_exact(sandwich);
    const auto reference = crlb_harmonic(fit.params, power / 10.0, 200);
    const double rel =
        std::abs(exact(0) - reference(0)) / std::abs(reference(0));
    all_ok &= check("degenerate mcrlb equals crlb", rel < 1e-8, rel, 1e-8);
    const auto asymptotic = mcrlb_asymptotic(fit.params, spec, 200);
    const double scale = std::abs(asymptotic.terms.curvature);
    const double residue = std::max({std::abs(asymptotic.terms.mismatch_hessian),
                                     std::abs(asymptotic.terms.mismatch_cross),
                                     std::abs(asymptotic.terms.mismatch_score)});
    all_ok &= check("degenerate Z, D, E vanish", residue < 1e-9 * scale,
                    residue / scale, 1e-9);
  }

  {
    Rng rng(derive_seed(args.seed, 1, 0));
    double worst_grad = 0.0;
    double worst_hess = 0.0;
    for (int point = 0; point < 5; ++point) {
      const std::size_t k_count = 4;
      std::vector<double> phases(k_count), amplitudes(k_count);
      for (double& p : phases) p = rng.uniform_angle();
      for (double& r : amplitudes) r = 0.25 + rng.uniform();
      HarmonicParams params(0.05 + 0.1 * rng.uniform(), phases, amplitudes);
      const double t = 64.0 * rng.uniform();
      const auto grad = model_gradient(params, t);
      const auto hess = model_hessian(params, t);
      auto flat = params.to_vector();
      const double step = 1e-6;
      for (std::size_t i = 0; i < flat.size(); ++i) {
        auto plus = flat, minus = flat;
        plus[i] += step;
        minus[i] -= step;
        const auto value = [&](const std::vector<double>& v) {
          const auto p = HarmonicParams::from_vector(v);
          const auto series =
              synthesize_model(p, static_cast<std::size_t>(t) + 1);
          return series.back();
        };
        const Complex fd_grad = (value(plus) - value(minus)) / (2.0 * step);
        worst_grad = std::max(worst_grad, std::abs(fd_grad - grad(i)) /
                                              std::max(1.0, std::abs(grad(i))));
        const auto grad_plus =
            model_gradient(HarmonicParams::from_vector(plus), t);
        const auto grad_minus =
            model_gradient(HarmonicParams::from_vector(minus), t);
        for (std::size_t j = 0; j < flat.size(); ++j) {
          const Complex fd_hess =
              (grad_plus(j) - grad_minus(j)) / (2.0 * step);
          worst_hess =
              std::max(worst_hess, std::abs(fd_hess - hess(i, j)) /
                                       std::max(1.0, std::abs(hess(i, j))));
        }
      }
    }
    all_ok &= check("gradient matches differences", worst_grad < 1e-5,
                    worst_grad, 1e-5);
    all_ok &= check("hessian matches differences", worst_hess < 1e-4,
                    worst_hess, 1e-4);
  }

  std::printf("selftest: %s\n", all_ok ? "PASS" : "FAIL");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic approximation bounds for inharmonic signals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", INHARMONICA_VERSION);

  BoundsArgs bounds_args;
  double fs_value = 0.0;
  auto* bounds = app.add_subcommand(
      "bounds", "Pseudo-true parameters and error bounds for one signal");
  bounds->add_option("--K", bounds_args.k_count, "Number of harmonic partials")
      ->required();
  bounds
      ->add_option("--omega", bounds_args.omega,
                   "Fundamental frequency, rad/sample (Hz when --fs is given)")
      ->required();
  auto* fs_opt = bounds->add_option(
      "--fs", fs_value, "Sample rate in Hz; frequency flags switch to Hz");
  auto* beta_opt = bounds->add_option(
      "--beta", bounds_args.beta, "Stiffness inharmonicity coefficient");
  bounds
      ->add_option("--offsets", bounds_args.offsets_text,
                   "Comma-separated per-partial frequency offsets")
      ->excludes(beta_opt);
  bounds->add_option("--N", bounds_args.n_samples, "Number of samples")
      ->capture_default_str();
  auto* snr_opt = bounds->add_option("--snr-db", bounds_args.snr_db,
                                     "Signal-to-noise ratio in dB")
                      ->capture_default_str();
  double sigma2_value = 0.0;
  bounds
      ->add_option("--sigma2", sigma2_value,
                   "Noise variance (overrides --snr-db)")
      ->excludes(snr_opt);
  bounds->add_option("--amplitudes", bounds_args.amplitudes_text,
                     "Comma-separated true amplitudes (default: bell profile)");
  bounds->add_option("--phases", bounds_args.phases_text,
                     "Comma-separated true phases (default: drawn from seed)");
  bounds->add_option("--seed", bounds_args.seed, "Random seed for phase draw")
      ->capture_default_str();
  bounds->add_flag("--decoupled-sine", bounds_args.decoupled_sine,
                   "Use the decoupled single-sinusoid CRLB reference");
  bounds->add_option("--json", bounds_args.json_path,
                     "Write the report as JSON to this path");
  bounds->add_option("--csv", bounds_args.csv_path,
                     "Write the report as CSV to this path");
  bounds->add_option("--grid-points", bounds_args.search.grid_points,
                     "Coarse search grid size (0 picks 8N)");
  bounds->add_option("--refine-tol", bounds_args.search.refine_tolerance,
                     "Golden-section bracket width target")
      ->capture_default_str();
  bounds->add_option("--window-lo", bounds_args.search.window_lo,
                     "Search window lower edge, rad/sample");
  bounds->add_option("--window-hi", bounds_args.search.window_hi,
                     "Search window upper edge, rad/sample");
  bounds->add_option("--omega-hint", bounds_args.omega_hint,
                     "Center the default search window at this frequency");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep", "Monte Carlo sweep against the bound curves, CSV output");
  sweep->add_option("config", sweep_args.config_path,
                    "Sweep configuration JSON file");
  sweep->add_option("--out", sweep_args.out_stem,
                    "Output stem for CSV and manifest")
      ->capture_default_str();
  sweep->add_option("--axis", sweep_args.axis, "Sweep axis: beta, n, snr_db");
  sweep->add_option("--values", sweep_args.values_text,
                    "Comma-separated axis values");
  sweep->add_option("--beta", sweep_args.beta, "Fixed stiffness coefficient");
  sweep->add_option("--n", sweep_args.n_samples, "Fixed sample count");
  sweep->add_option("--snr-db", sweep_args.snr_db, "Fixed SNR in dB");
  sweep->add_option("--trials", sweep_args.trials, "Monte Carlo trials per cell");
  sweep->add_option("--K", sweep_args.k_count, "Number of harmonic partials");
  sweep->add_option("--omega", sweep_args.omega,
                    "True fundamental, rad/sample");
  sweep->add_option("--amplitudes", sweep_args.amplitudes_text,
                    "Comma-separated true amplitudes");
  sweep->add_option("--phase-mode", sweep_args.phase_mode,
                    "Phase protocol: redraw or fixed");
  sweep->add_option("--bound-draws", sweep_args.bound_draws,
                    "Phase draws averaged into the bound curves");
  sweep->add_flag("--unstructured", sweep_args.unstructured,
                  "Also run the unstructured estimator");
  sweep->add_option("--seed", sweep_args.seed, "Master seed");
  sweep->add_option("--threads", sweep_args.threads,
                    "Worker thread cap (0 = auto)");

  SpeechArgs speech_args;
  auto* speech = app.add_subcommand(
      "speech", "Frame-based bound ratios for a speech recording");
  speech->add_option("wav", speech_args.wav_path, "Input WAV file (mono)")
      ->required();
  speech->add_option("--out", speech_args.out_stem,
                     "Output stem for JSONL, CSV and manifest")
      ->capture_default_str();
  speech->add_option("--frame-ms", speech_args.frame_ms,
                     "Frame length in milliseconds")
      ->capture_default_str();
  speech->add_option("--snr-db", speech_args.snr_text,
                     "Comma-separated imposed SNRs in dB")
      ->capture_default_str();
  speech->add_option("--bound-samples", speech_args.detect.bound_samples,
                     "Sample horizon for the bound evaluation")
      ->capture_default_str();
  speech->add_option("--threshold-db", speech_args.detect.threshold_db,
                     "Peak threshold above the median periodogram, dB")
      ->capture_default_str();
  speech->add_option("--pad-factor", speech_args.detect.pad_factor,
                     "Periodogram zero-padding factor")
      ->capture_default_str();
  speech->add_option("--max-peaks", speech_args.detect.max_peaks,
                     "Peak count cap before order assignment")
      ->capture_default_str();
  speech->add_option("--suppress-bins", speech_args.detect.suppress_bins,
                     "Peak exclusion radius in natural DFT bins")
      ->capture_default_str();
  speech->add_option("--min-K", speech_args.detect.min_components,
                     "Minimum accepted component count")
      ->capture_default_str();
  speech->add_option("--max-K", speech_args.detect.max_components,
                     "Maximum accepted component count")
      ->capture_default_str();
  speech->add_option("--threads", speech_args.threads,
                     "Worker thread cap (0 = auto)");
  speech->add_option("--seed", speech_args.seed, "Recorded in the manifest")
      ->capture_default_str();

  SelftestArgs selftest_args;
  auto* selftest = app.add_subcommand(
      "selftest", "Degeneracy and derivative sanity checks");
  selftest->add_option("--seed", selftest_args.seed, "Random seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = joined_command(argc, argv);
  try {
    if (bounds->parsed()) {
      if (fs_opt->count() > 0) bounds_args.sample_rate = fs_value;
      if (bounds->count("--sigma2") > 0) bounds_args.sigma2 = sigma2_value;
      return run_bounds(bounds_args, command);
    }
    if (sweep->parsed()) return run_sweep(sweep_args, command);
    if (speech->parsed()) return run_speech(speech_args, command);
    if (selftest->parsed()) return run_selftest(selftest_args);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
