#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eduspace {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Provenance record for one pipeline run: the hash of the canonical config,
/// a digest per input file, and a digest per emitted artifact. Every file the
/// run writes into the output directory must be registered here (the manifest
/// itself excepted), so a directory can be audited against its manifest.
/// Timestamps are off by default to keep reruns byte-identical.
class RunManifest {
 public:
  RunManifest(std::string output_dir, const std::string& canonical_config, uint64_t seed,
              bool with_timestamp);

  void add_input(const std::string& path);         // absolute or cwd-relative, hashed now
  void add_artifact(const std::string& relative);  // relative to output_dir, hashed at write()

  const std::string& output_dir() const { return output_dir_; }

  /// Writes <output_dir>/manifest.json.
  void write() const;

 private:
  std::string output_dir_;
  std::string config_hash_;
  uint64_t seed_;
  bool with_timestamp_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, digest
  std::vector<std::string> artifacts_;
};

}  // namespace eduspace
