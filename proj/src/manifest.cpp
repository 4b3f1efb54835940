#include "eduspace/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"

#include "eduspace/archetype.hpp"
#include "eduspace/error.hpp"
#include "eduspace/sha256.hpp"

namespace eduspace {

RunManifest::RunManifest(std::string output_dir, const std::string& canonical_config,
                         uint64_t seed, bool with_timestamp)
    : output_dir_(std::move(output_dir)),
      config_hash_(sha256_hex(canonical_config)),
      seed_(seed),
      with_timestamp_(with_timestamp) {}

void RunManifest::add_input(const std::string& path) {
  inputs_.emplace_back(path, sha256_file_hex(path));
}

void RunManifest::add_artifact(const std::string& relative) { artifacts_.push_back(relative); }

void RunManifest::write() const {
  nlohmann::json doc;
  doc["engine_version"] = kEngineVersion;
  doc["archetype_rule_version"] = kArchetypeRuleVersion;
  doc["config_sha256"] = config_hash_;
  doc["seed"] = seed_;

  auto inputs = inputs_;
  std::sort(inputs.begin(), inputs.end());
  doc["inputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : inputs) {
    doc["inputs"].push_back({{"path", path}, {"sha256", digest}});
  }

  auto artifacts = artifacts_;
  std::sort(artifacts.begin(), artifacts.end());
  doc["artifacts"] = nlohmann::json::array();
  for (const auto& relative : artifacts) {
    doc["artifacts"].push_back(
        {{"path", relative}, {"sha256", sha256_file_hex(output_dir_ + "/" + relative)}});
  }

  if (with_timestamp_) {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    doc["timestamp"] = buf;
  }

  const std::string path = output_dir_ + "/manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace eduspace
