#pragma once

#include <filesystem>
#include <vector>

namespace inharmonica {

struct AudioBuffer {
  std::vector<double> samples;  // mono, nominally in [-1, 1)
  double sample_rate = 0.0;     // Hz
};

// Reads a mono WAV file. Supported encodings: 16-bit PCM (scaled by 1/32768)
// and 32-bit IEEE float. Anything else raises std::runtime_error with a
// diagnostic naming the offending field.
AudioBuffer read_wav(const std::filesystem::path& path);

void write_wav_pcm16(const std::filesystem::path& path,
                     const std::vector<double>& samples, double sample_rate);
void write_wav_float32(const std::filesystem::path& path,
                       const std::vector<double>& samples, double sample_rate);

}  // namespace inharmonica
