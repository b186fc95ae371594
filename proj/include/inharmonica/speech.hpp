#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "inharmonica/pseudo_true.hpp"
#include "inharmonica/types.hpp"
#include "inharmonica/wav.hpp"

namespace inharmonica {

// Frame-level analysis configuration. Frequencies are rad/sample.
struct DetectConfig {
  double threshold_db = 10.0;     // peak height above the median periodogram
  std::size_t pad_factor = 16;    // periodogram zero-padding
  double min_freq = 0.0;          // 0 picks one cycle per frame
  double max_freq = 0.0;          // 0 picks 0.95 * pi
  std::size_t max_peaks = 16;
  double suppress_bins = 2.5;     // peak exclusion radius, natural DFT bins
  std::size_t min_components = 3;
  std::size_t max_components = 10;
  std::vector<double> snr_db{0.0, 10.0};  // imposed SNRs for the bounds
  std::size_t bound_samples = 200;        // horizon for the bound evaluation
  SearchConfig search;
};

// Slice into non-overlapping frames of round(frame_ms * fs / 1000) samples;
// a trailing partial frame is dropped.
std::vector<std::vector<double>> frame_signal(
    const std::vector<double>& samples, double sample_rate, double frame_ms);

struct RatioEntry {
  double snr_db = 0.0;
  double mcrlb_exact_omega = 0.0;
  double crlb_sine_1 = 0.0;
  double bias_1 = 0.0;
  double mse_lb_1 = 0.0;
  double ratio_mse = 0.0;    // mse_lb_1 / crlb_sine_1
  double ratio_mcrlb = 0.0;  // mcrlb_exact_omega / crlb_sine_1
};

struct SinusoidEstimate {
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::vector<double> frequencies;
};

struct FrameAnalysis {
  std::size_t frame_index = 0;
  bool accepted = false;
  std::string rejection_reason;  // empty when accepted
  std::size_t detected_count = 0;
  SinusoidEstimate sinusoids;
  double noise_variance_estimate = 0.0;
  double omega0 = 0.0;  // pseudo-true fundamental of the fitted set
  std::vector<RatioEntry> ratios;
};

// Full analysis of one analytic frame: periodogram peak picking, unstructured
// refinement, harmonic-order assignment, then bound ratios at the configured
// imposed SNRs with the fitted sinusoid set treated as ground truth.
FrameAnalysis analyze_frame(const ComplexSeries& frame,
                            const DetectConfig& config,
                            std::size_t frame_index = 0);

// Frames a buffer, runs analyze_frame on each (parallel over frames,
// deterministic result order).
std::vector<FrameAnalysis> analyze_buffer(const AudioBuffer& audio,
                                          double frame_ms,
                                          const DetectConfig& config,
                                          std::size_t max_threads = 0);

// One JSON object (single line) describing a frame analysis.
std::string frame_analysis_json(const FrameAnalysis& analysis);

// Empirical CDF of the accepted frames' bound ratios, grouped by SNR and
// ratio kind ("mse", "mcrlb"). Columns: snr_db,ratio_kind,ratio,cdf.
void ratio_cdf(const std::vector<FrameAnalysis>& analyses,
               const std::filesystem::path& csv_path);

std::map<std::string, std::size_t> rejection_histogram(
    const std::vector<FrameAnalysis>& analyses);

}  // namespace inharmonica
