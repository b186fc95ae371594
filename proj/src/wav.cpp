#include "inharmonica/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace inharmonica {

namespace {

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void append_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

std::string wav_header(std::uint16_t format, std::uint16_t bits,
                       std::uint32_t sample_rate, std::uint32_t data_bytes) {
  std::string out;
  out.reserve(44);
  out += "RIFF";
  append_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  append_u32(out, 16);
  append_u16(out, format);
  append_u16(out, 1);  // mono
  append_u32(out, sample_rate);
  const std::uint32_t block = bits / 8;
  append_u32(out, sample_rate * block);
  append_u16(out, static_cast<std::uint16_t>(block));
  append_u16(out, bits);
  out += "data";
  append_u32(out, data_bytes);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error(path.string() + " is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    const std::uint8_t* chunk = bytes.data() + pos + 8;
    if (pos + 8 + chunk_size > bytes.size()) {
      throw std::runtime_error(path.string() + ": truncated chunk");
    }
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw std::runtime_error(path.string() + ": fmt chunk too short");
      }
      format = read_u16(chunk);
      channels = read_u16(chunk + 2);
      sample_rate = read_u32(chunk + 4);
      bits = read_u16(chunk + 14);
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data = chunk;
      data_bytes = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (sample_rate == 0 || data == nullptr) {
    throw std::runtime_error(path.string() + ": missing fmt or data chunk");
  }
  if (channels != 1) {
    throw std::runtime_error(path.string() + ": expected mono, got " +
                             std::to_string(channels) + " channels");
  }

  AudioBuffer buffer;
  buffer.sample_rate = static_cast<double>(sample_rate);
  if (format == 1 && bits == 16) {
    const std::size_t count = data_bytes / 2;
    buffer.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto raw = static_cast<std::int16_t>(read_u16(data + 2 * i));
      buffer.samples[i] = static_cast<double>(raw) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t count = data_bytes / 4;
    buffer.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      float value;
      std::memcpy(&value, data + 4 * i, 4);
      buffer.samples[i] = static_cast<double>(value);
    }
  } else {
    throw std::runtime_error(
        path.string() + ": unsupported encoding (format tag " +
        std::to_string(format) + ", " + std::to_string(bits) +
        " bits); expected 16-bit PCM or 32-bit float");
  }
  return buffer;
}

void write_wav_pcm16(const std::filesystem::path& path,
                     const std::vector<double>& samples, double sample_rate) {
  std::string out = wav_header(
      1, 16, static_cast<std::uint32_t>(std::lround(sample_rate)),
      static_cast<std::uint32_t>(samples.size() * 2));
  for (double s : samples) {
    const double scaled = std::clamp(s * 32768.0, -32768.0, 32767.0);
    append_u16(out, static_cast<std::uint16_t>(
                        static_cast<std::int16_t>(std::lround(scaled))));
  }
  write_file(path, out);
}

void write_wav_float32(const std::filesystem::path& path,
                       const std::vector<double>& samples,
                       double sample_rate) {
  std::string out = wav_header(
      3, 32, static_cast<std::uint32_t>(std::lround(sample_rate)),
      static_cast<std::uint32_t>(samples.size() * 4));
  for (double s : samples) {
    const auto value = static_cast<float>(s);
    std::uint32_t raw;
    std::memcpy(&raw, &value, 4);
    append_u32(out, raw);
  }
  write_file(path, out);
}

}  // namespace inharmonica
