#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace inharmonica::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string() + " for hashing");
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr ||
      EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  std::array<char, 65536> buffer;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(got)) !=
            1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("sha256 update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int digest_len = 0;
  if (EVP_DigestFinal_ex(ctx, digest.data(), &digest_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 final failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
  std::tm split{};
  gmtime_r(&seconds, &split);
  char text[32];
  std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &split);
  return text;
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& manifest_path) {
  nlohmann::json doc;
  doc["tool"] = manifest.tool;
  doc["version"] = manifest.version;
  doc["command"] = manifest.command;
  doc["seed"] = manifest.seed;
  doc["threads"] = manifest.threads;
  doc["timestamp"] =
      manifest.timestamp.empty() ? utc_timestamp() : manifest.timestamp;
  doc["config"] = manifest.config;
  auto& outputs = doc["outputs"] = nlohmann::json::array();
  for (const auto& path : manifest.outputs) {
    nlohmann::json entry;
    entry["path"] = path.filename().string();
    entry["bytes"] = std::filesystem::file_size(path);
    entry["sha256"] = sha256_file(path);
    outputs.push_back(entry);
  }
  std::ofstream out(manifest_path);
  if (!out) {
    throw std::runtime_error("cannot write " + manifest_path.string());
  }
  out << doc.dump(2) << '\n';
}

}  // namespace inharmonica::cli
