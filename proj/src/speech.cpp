#include "inharmonica/speech.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "inharmonica/bounds.hpp"
#include "inharmonica/estimators.hpp"
#include "inharmonica/fft.hpp"
#include "inharmonica/format.hpp"
#include "inharmonica/threading.hpp"

namespace inharmonica {

std::vector<std::vector<double>> frame_signal(
    const std::vector<double>& samples, double sample_rate, double frame_ms) {
  if (!(sample_rate > 0.0) || !(frame_ms > 0.0)) {
    throw std::invalid_argument("sample rate and frame length must be positive");
  }
  const auto frame_len =
      static_cast<std::size_t>(std::llround(frame_ms * sample_rate / 1000.0));
  if (frame_len == 0) throw std::invalid_argument("frame shorter than one sample");
  std::vector<std::vector<double>> frames;
  frames.reserve(samples.size() / frame_len);
  for (std::size_t start = 0; start + frame_len <= samples.size();
       start += frame_len) {
    frames.emplace_back(samples.begin() + static_cast<std::ptrdiff_t>(start),
                        samples.begin() +
                            static_cast<std::ptrdiff_t>(start + frame_len));
  }
  return frames;
}

namespace {

struct Peak {
  double freq = 0.0;
  double power = 0.0;
};

// Local periodogram maxima above the median-relative threshold, strongest
// first, refined by log-parabolic interpolation. Detection runs on a Hann
// windowed copy so that strong partials' side lobes stay below the
// threshold; the window only affects peak picking, not the later fit.
std::vector<double> detect_peaks(const ComplexSeries& frame,
                                 const DetectConfig& config) {
  const std::size_t n = frame.size();
  const std::size_t n_fft = std::max<std::size_t>(n * config.pad_factor, n);
  ComplexSeries windowed(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double w =
        0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(t) /
                             static_cast<double>(n - 1));
    windowed[t] = frame[t] * w;
  }
  const std::vector<double> power = periodogram(windowed, n_fft);
  const std::size_t half = n_fft / 2;

  std::vector<double> sorted(power.begin(),
                             power.begin() + static_cast<std::ptrdiff_t>(half));
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double threshold =
      median * std::pow(10.0, config.threshold_db / 10.0);

  const double bin_width = kTwoPi / static_cast<double>(n_fft);
  const double lo = config.min_freq > 0.0
                        ? config.min_freq
                        : kTwoPi / static_cast<double>(n);
  const double hi =
      config.max_freq > 0.0 ? config.max_freq : 0.95 * std::numbers::pi;

  std::vector<Peak> peaks;
  for (std::size_t b = 1; b + 1 < half; ++b) {
    if (!(power[b] > power[b - 1]) || !(power[b] >= power[b + 1])) continue;
    if (power[b] < threshold) continue;
    const double freq_bin = static_cast<double>(b) * bin_width;
    if (freq_bin < lo || freq_bin > hi) continue;
    // Log-parabolic vertex around the peak bin.
    const double eps = 1e-300;
    const double la = std::log(power[b - 1] + eps);
    const double lb = std::log(power[b] + eps);
    const double lc = std::log(power[b + 1] + eps);
    const double denom = la - 2.0 * lb + lc;
    double shift = 0.0;
    if (denom < 0.0) shift = 0.5 * (la - lc) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    peaks.push_back(
        {(static_cast<double>(b) + shift) * bin_width, power[b]});
  }

  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.power > b.power; });

  // Greedy extraction: each accepted peak suppresses candidates within its
  // main lobe and first side lobe (the Hann lobe spans two natural bins,
  // the first side lobe peaks half a bin beyond).
  const double suppress =
      config.suppress_bins * kTwoPi / static_cast<double>(n);
  std::vector<double> freqs;
  for (const Peak& p : peaks) {
    if (freqs.size() >= config.max_peaks) break;
    bool shadowed = false;
    for (double kept : freqs) {
      if (std::abs(p.freq - kept) < suppress) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) freqs.push_back(p.freq);
  }
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

FrameAnalysis analyze_frame(const ComplexSeries& frame,
                            const DetectConfig& config,
                            std::size_t frame_index) {
  FrameAnalysis out;
  out.frame_index = frame_index;

  const std::vector<double> peaks = detect_peaks(frame, config);
  out.detected_count = peaks.size();
  if (peaks.empty()) {
    out.rejection_reason = "no_peaks";
    return out;
  }
  if (peaks.size() < config.min_components) {
    out.rejection_reason = "too_few_components";
    return out;
  }
  if (peaks.size() > config.max_components) {
    out.rejection_reason = "too_many_components";
    return out;
  }

  UnstructuredEstimate fit;
  try {
    fit = unstructured_mle(frame, peaks);
  } catch (const std::exception&) {
    out.rejection_reason = "refinement_failed";
    return out;
  }
  if (!fit.converged) {
    out.rejection_reason = "refinement_failed";
    return out;
  }
  out.sinusoids.amplitudes = fit.params.amplitudes;
  out.sinusoids.phases = fit.params.phases;
  out.sinusoids.frequencies = fit.params.frequencies;
  out.noise_variance_estimate = fit.residual_variance;

  // Harmonic-order assignment by median spacing: the refined partials must
  // land on consecutive orders 1..K.
  const std::vector<double>& nus = fit.params.frequencies;
  const std::size_t k_count = nus.size();
  std::vector<double> gaps(k_count - 1);
  for (std::size_t j = 1; j < k_count; ++j) gaps[j - 1] = nus[j] - nus[j - 1];
  const double spacing = median_of(gaps);
  if (!(spacing > 0.0)) {
    out.rejection_reason = "missing_harmonics";
    return out;
  }
  for (std::size_t j = 0; j < k_count; ++j) {
    const long order = std::lround(nus[j] / spacing);
    if (order != static_cast<long>(j + 1)) {
      out.rejection_reason = "missing_harmonics";
      return out;
    }
  }

  for (double r : fit.params.amplitudes) {
    if (!(r > 0.0)) {
      out.rejection_reason = "degenerate_amplitude";
      return out;
    }
  }

  // Treat the fitted set as ground truth; bounds at the imposed SNRs over a
  // fixed horizon. The pseudo-true point does not depend on the noise level.
  try {
    double power = 0.0;
    for (double r : fit.params.amplitudes) power += r * r;
    SearchConfig search = config.search;
    if (search.omega_hint <= 0.0 && search.window_hi <= search.window_lo) {
      search.omega_hint = spacing;
    }
    const std::size_t n = config.bound_samples;
    const TrueSignalSpec probe(fit.params.amplitudes, fit.params.phases,
                               fit.params.frequencies, 0.0);
    const PseudoTrueResult pt = solve_pseudo_true(probe, n, search);
    out.omega0 = pt.params.omega();
    const double bias1 = pt.params.omega() - nus.front();

    for (double snr_db : config.snr_db) {
      const double sb2 = power / std::pow(10.0, snr_db / 10.0);
      const TrueSignalSpec truth(fit.params.amplitudes, fit.params.phases,
                                 fit.params.frequencies, sb2);
      const SandwichMatrices matrices = build_sandwich(pt.params, truth, n);
      RatioEntry entry;
      entry.snr_db = snr_db;
      entry.mcrlb_exact_omega = mcrlb_exact(matrices)(0);
      entry.crlb_sine_1 = crlb_unstructured(truth, n)(0);
      entry.bias_1 = bias1;
      entry.mse_lb_1 = bias1 * bias1 + entry.mcrlb_exact_omega;
      entry.ratio_mse = entry.mse_lb_1 / entry.crlb_sine_1;
      entry.ratio_mcrlb = entry.mcrlb_exact_omega / entry.crlb_sine_1;
      out.ratios.push_back(entry);
    }
  } catch (const std::exception& err) {
    out.rejection_reason = std::string("bound_failure: ") + err.what();
    out.ratios.clear();
    return out;
  }

  out.accepted = true;
  return out;
}

std::vector<FrameAnalysis> analyze_buffer(const AudioBuffer& audio,
                                          double frame_ms,
                                          const DetectConfig& config,
                                          std::size_t max_threads) {
  const std::vector<std::vector<double>> frames =
      frame_signal(audio.samples, audio.sample_rate, frame_ms);
  std::vector<FrameAnalysis> analyses(frames.size());
  parallel_for(frames.size(), max_threads, [&](std::size_t i) {
    analyses[i] = analyze_frame(analytic_signal(frames[i]), config, i);
  });
  return analyses;
}

std::string frame_analysis_json(const FrameAnalysis& analysis) {
  nlohmann::json doc;
  doc["frame_index"] = analysis.frame_index;
  doc["accepted"] = analysis.accepted;
  doc["rejection_reason"] = analysis.rejection_reason;
  doc["detected_count"] = analysis.detected_count;
  doc["noise_variance_estimate"] = analysis.noise_variance_estimate;
  doc["omega0"] = analysis.omega0;
  doc["sinusoids"] = {{"amplitudes", analysis.sinusoids.amplitudes},
                      {"phases", analysis.sinusoids.phases},
                      {"frequencies", analysis.sinusoids.frequencies}};
  doc["ratios"] = nlohmann::json::array();
  for (const RatioEntry& entry : analysis.ratios) {
    doc["ratios"].push_back({{"snr_db", entry.snr_db},
                             {"mcrlb_exact_omega", entry.mcrlb_exact_omega},
                             {"crlb_sine_1", entry.crlb_sine_1},
                             {"bias_1", entry.bias_1},
                             {"mse_lb_1", entry.mse_lb_1},
                             {"ratio_mse", entry.ratio_mse},
                             {"ratio_mcrlb", entry.ratio_mcrlb}});
  }
  return doc.dump();
}

void ratio_cdf(const std::vector<FrameAnalysis>& analyses,
               const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) {
    throw std::runtime_error("cannot open " + csv_path.string() +
                             " for writing");
  }
  out << "snr_db,ratio_kind,ratio,cdf\n";

  std::size_t accepted = 0;
  std::vector<double> snrs;
  for (const FrameAnalysis& fa : analyses) {
    if (!fa.accepted) continue;
    ++accepted;
    for (const RatioEntry& entry : fa.ratios) {
      if (std::find(snrs.begin(), snrs.end(), entry.snr_db) == snrs.end()) {
        snrs.push_back(entry.snr_db);
      }
    }
  }
  if (accepted == 0) {
    // The header-only file above still exists so downstream tooling sees a
    // well-formed empty table.
    std::string message = "no accepted frames among " +
                          std::to_string(analyses.size()) + " analyzed";
    for (const auto& [reason, count] : rejection_histogram(analyses)) {
      message += "; " + reason + ": " + std::to_string(count);
    }
    throw std::runtime_error(message);
  }
  std::sort(snrs.begin(), snrs.end());

  using detail::format_full;
  for (double snr : snrs) {
    for (const char* kind : {"mse", "mcrlb"}) {
      std::vector<double> ratios;
      for (const FrameAnalysis& fa : analyses) {
        if (!fa.accepted) continue;
        for (const RatioEntry& entry : fa.ratios) {
          if (entry.snr_db != snr) continue;
          ratios.push_back(std::string(kind) == "mse" ? entry.ratio_mse
                                                      : entry.ratio_mcrlb);
        }
      }
      std::sort(ratios.begin(), ratios.end());
      for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double cdf = static_cast<double>(i + 1) /
                           static_cast<double>(ratios.size());
        out << format_full(snr) << ',' << kind << ','
            << format_full(ratios[i]) << ',' << format_full(cdf) << '\n';
      }
    }
  }
}

std::map<std::string, std::size_t> rejection_histogram(
    const std::vector<FrameAnalysis>& analyses) {
  std::map<std::string, std::size_t> histogram;
  for (const FrameAnalysis& fa : analyses) {
    if (!fa.accepted) ++histogram[fa.rejection_reason];
  }
  return histogram;
}

}  // namespace inharmonica
