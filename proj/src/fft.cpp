#include "inharmonica/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace inharmonica {

namespace {

// The FFTW planner mutates global state; plan creation and destruction must
// be serialized. Execution of an existing plan is thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void fft(ComplexSeries& data, bool inverse) {
  if (data.empty()) return;
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buffer, buffer,
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("FFTW failed to create a plan");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(data.size());
    for (Complex& c : data) c *= scale;
  }
}

ComplexSeries analytic_signal(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  if (n == 0) throw std::invalid_argument("empty frame");
  ComplexSeries spectrum(n);
  for (std::size_t t = 0; t < n; ++t) spectrum[t] = Complex(frame[t], 0.0);
  fft(spectrum);
  // DC stays; for even n the Nyquist bin stays as well.
  for (std::size_t b = 1; b < (n + 1) / 2; ++b) spectrum[b] *= 2.0;
  for (std::size_t b = n / 2 + 1; b < n; ++b) spectrum[b] = Complex(0.0, 0.0);
  fft(spectrum, true);
  return spectrum;
}

std::vector<double> periodogram(const ComplexSeries& frame,
                                std::size_t n_fft) {
  if (frame.empty()) throw std::invalid_argument("empty frame");
  if (n_fft < frame.size()) {
    throw std::invalid_argument("n_fft must be at least the frame length");
  }
  ComplexSeries padded(n_fft, Complex(0.0, 0.0));
  std::copy(frame.begin(), frame.end(), padded.begin());
  fft(padded);
  std::vector<double> power(n_fft);
  const double scale = 1.0 / static_cast<double>(frame.size());
  for (std::size_t b = 0; b < n_fft; ++b) {
    power[b] = std::norm(padded[b]) * scale;
  }
  return power;
}

}  // namespace inharmonica
