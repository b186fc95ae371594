#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace inharmonica::cli {

// Provenance sidecar written next to every output set. Re-running the tool
// with the recorded config and seed reproduces the outputs bit-identically;
// only the timestamp differs.
struct RunManifest {
  std::string tool = "inharmonica";
  std::string version;
  std::string command;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string timestamp;
  nlohmann::json config;
  std::vector<std::filesystem::path> outputs;
};

std::string sha256_file(const std::filesystem::path& path);
std::string utc_timestamp();

// Hashes the listed outputs and writes `<stem>.manifest.json`.
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& manifest_path);

}  // namespace inharmonica::cli
