#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace levnano {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct ManifestTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Run record: tool version, config hash, checksummed inputs and outputs.
/// Wall-clock values live here only, never in data files.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<ManifestFile> inputs;
  std::vector<ManifestFile> outputs;
  std::vector<ManifestTiming> timings;
  std::vector<std::string> warnings;

  void add_input(const std::filesystem::path& file);
  /// Checksums `file` (inside `root`) and records it.
  void add_output(const std::filesystem::path& root, const std::filesystem::path& file);
  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

const char* tool_version();

}  // namespace levnano
