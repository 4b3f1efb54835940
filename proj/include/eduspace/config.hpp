#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/features.hpp"
#include "eduspace/ingest.hpp"
#include "eduspace/kde.hpp"
#include "eduspace/kmeans.hpp"
#include "eduspace/logit.hpp"
#include "eduspace/migration.hpp"

namespace eduspace {

/// Everything a pipeline run reads; one declarative JSON file, no hidden
/// defaults beyond the initializers here. Unknown keys are errors so typos
/// cannot silently fall back to defaults.
struct RunConfig {
  // either both file paths, or a synth preset that generates them
  std::string secondary_path;
  std::string enrollment_path;
  std::string synth_preset;
  int64_t synth_n = 0;  // 0 keeps the preset default

  std::string output_dir = "out";
  uint64_t seed = 7;
  bool seed_explicit = false;  // set when the config file names a seed
  int threads = 0;             // 0 = hardware concurrency

  SecondarySchema secondary_schema;
  EnrollmentSchema enrollment_schema;
  ValidationRules validation;
  FeatureOptions features;

  int cluster_k = 7;
  int cluster_restarts = 10;
  double cluster_tol = 1e-6;
  int cluster_max_iter = 300;
  int scan_lo = 0;  // 0 disables the k scan
  int scan_hi = 0;
  int64_t silhouette_sample = 10000;

  int grid_size = 200;
  double bandwidth = 0;  // 0 = Scott's rule
  std::vector<std::string> careers = {"Medicine", "Law", "Engineering", "Technical",
                                      "Anthropology"};

  bool exclude_metro = true;
  int metro_code = kMetropolitanRegion;
  int64_t min_cell = 10;
  std::vector<GroupKey> group_by = {GroupKey::Cluster};

  std::vector<int> models = {1, 2, 3, 4, 5};
  std::string baseline = "Achievers";
  LogitOptions logit;

  bool emit_timestamps = false;  // keeps artifacts byte-reproducible
};

/// Parses the JSON text; any unknown key or ill-typed value throws
/// Error{InvalidConfig} naming the offender.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file; Error{IoError} when unreadable.
RunConfig load_config(const std::string& path);

/// Canonical JSON rendering of a config (sorted keys, all analysis fields
/// explicit); the manifest hashes this. Execution-environment fields
/// (output_dir, threads) are omitted so identical analyses hash identically.
std::string config_json(const RunConfig& config);

const char* to_string(GroupKey key);
GroupKey group_key_from_string(const std::string& name);

}  // namespace eduspace
