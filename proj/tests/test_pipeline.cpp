#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "eduspace/config.hpp"
#include "eduspace/error.hpp"
#include "eduspace/manifest.hpp"
#include "eduspace/pipeline.hpp"
#include "eduspace/sha256.hpp"

using namespace eduspace;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("eduspace_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

RunConfig small_fig1a(const std::string& out, uint64_t seed = 7) {
  RunConfig config;
  config.synth_preset = "fig1a";
  config.synth_n = 3000;
  config.output_dir = out;
  config.seed = seed;
  config.seed_explicit = true;
  config.cluster_restarts = 4;
  config.grid_size = 64;
  config.threads = 1;
  return config;
}

std::set<std::string> dir_files(const fs::path& dir) {
  std::set<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.insert(fs::relative(entry.path(), dir).generic_string());
    }
  }
  return files;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("full run writes every artifact and an audited manifest") {
  TempDir tmp("full");
  auto result = run_pipeline(small_fig1a(tmp.str()));
  CHECK(result.last_stage == Stage::Report);
  CHECK(result.trajectories.size() == 3000);
  CHECK(result.rejected_rows == 0);
  CHECK(result.cluster.centroids.rows() == 7);
  CHECK(result.cluster_names.size() == 7);
  CHECK(result.coords.cols() == 2);
  CHECK(!result.rates.rows.empty());
  CHECK(result.ladder.models.size() == 5);

  const std::vector<std::string> expected = {
      "secondary.csv",      "enrollment.csv",    "ground_truth.csv", "rejects.csv",
      "trajectories.csv",   "features.csv",      "schools.csv",      "cluster_model.json",
      "assignments.csv",    "space_model.json",  "space_coords.csv", "migration_rates.csv",
      "migration_rates_by_year.csv", "migration_matrix.csv",
      "model_comparison.txt", "model_comparison.csv",
      "model_comparison.json", "notices.txt",
  };
  auto files = dir_files(tmp.path);
  for (const auto& name : expected) {
    INFO(name);
    CHECK(files.count(name) == 1);
  }
  CHECK(files.count("manifest.json") == 1);

  // the manifest lists exactly the directory contents minus itself
  auto doc = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& a : doc["artifacts"]) listed.insert(a["path"].get<std::string>());
  std::set<std::string> on_disk = files;
  on_disk.erase("manifest.json");
  CHECK(listed == on_disk);
  for (const auto& a : doc["artifacts"]) {
    const auto digest = sha256_file_hex((tmp.path / a["path"].get<std::string>()).string());
    CHECK(digest == a["sha256"].get<std::string>());
  }
  CHECK(doc["engine_version"].get<std::string>() == kEngineVersion);
  CHECK(doc["seed"].get<uint64_t>() == 7);
  CHECK(!doc.contains("timestamp"));
}

TEST_CASE("reruns are byte-identical across directories and thread counts") {
  TempDir a("rerun_a"), b("rerun_b");
  auto ca = small_fig1a(a.str());
  auto cb = small_fig1a(b.str());
  cb.threads = 4;
  run_pipeline(ca);
  run_pipeline(cb);
  auto fa = dir_files(a.path), fb = dir_files(b.path);
  REQUIRE(fa == fb);
  for (const auto& name : fa) {
    INFO(name);
    CHECK(sha256_file_hex((a.path / name).string()) == sha256_file_hex((b.path / name).string()));
  }
}

TEST_CASE("a different seed changes the results") {
  TempDir a("seed_a"), b("seed_b");
  run_pipeline(small_fig1a(a.str(), 7), Stage::Features);
  run_pipeline(small_fig1a(b.str(), 8), Stage::Features);
  CHECK(sha256_file_hex((a.path / "features.csv").string()) !=
        sha256_file_hex((b.path / "features.csv").string()));
}

TEST_CASE("stage prefixes stop where asked and still write a manifest") {
  TempDir tmp("prefix");
  auto result = run_pipeline(small_fig1a(tmp.str()), Stage::Features);
  CHECK(result.last_stage == Stage::Features);
  auto files = dir_files(tmp.path);
  CHECK(files.count("features.csv") == 1);
  CHECK(files.count("cluster_model.json") == 0);
  CHECK(files.count("model_comparison.txt") == 0);
  CHECK(files.count("manifest.json") == 1);

  auto doc = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& a : doc["artifacts"]) listed.insert(a["path"].get<std::string>());
  files.erase("manifest.json");
  CHECK(listed == files);
}

TEST_CASE("k scan writes the validation curve and marks the knee") {
  TempDir tmp("scan");
  auto config = small_fig1a(tmp.str());
  config.synth_preset = "blobs3";
  config.synth_n = 1200;
  config.scan_lo = 2;
  config.scan_hi = 5;
  config.cluster_k = 3;
  auto result = run_pipeline(config, Stage::Cluster);
  CHECK(result.scanned);
  CHECK(result.curve.knee_k == 3);
  CHECK(dir_files(tmp.path).count("validation_curve.csv") == 1);

  config.scan_lo = 5;
  config.scan_hi = 2;
  TempDir bad("scan_bad");
  config.output_dir = bad.str();
  CHECK_THROWS_AS(run_pipeline(config, Stage::Cluster), Error);
}

TEST_CASE("generic cluster names appear when k is not seven") {
  TempDir tmp("k3");
  auto config = small_fig1a(tmp.str());
  config.synth_preset = "blobs3";
  config.synth_n = 900;
  config.cluster_k = 3;
  auto result = run_pipeline(config, Stage::Cluster);
  REQUIRE(result.cluster_names.size() == 3);
  CHECK(result.cluster_names[0] == "C1");
  CHECK(result.cluster_names[2] == "C3");
}

TEST_CASE("input validation happens before any work") {
  RunConfig none;
  none.output_dir = (fs::temp_directory_path() / "eduspace_test_none").string();
  none.secondary_path.clear();
  none.enrollment_path.clear();
  none.synth_preset.clear();
  CHECK_THROWS_AS(run_pipeline(none), Error);

  RunConfig both = small_fig1a(none.output_dir);
  both.secondary_path = "x.csv";
  both.enrollment_path = "y.csv";
  CHECK_THROWS_AS(run_pipeline(both), Error);

  RunConfig missing;
  missing.output_dir = none.output_dir;
  missing.secondary_path = "/nonexistent/sec.csv";
  missing.enrollment_path = "/nonexistent/enr.csv";
  try {
    run_pipeline(missing);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(exit_code_for(e.code()) == 5);
  }
  fs::remove_all(none.output_dir);
}

TEST_CASE("config json round trips through the parser") {
  RunConfig config = small_fig1a("ignored");
  config.scan_lo = 2;
  config.scan_hi = 9;
  config.group_by = {GroupKey::Cluster, GroupKey::CareerArea};
  config.models = {1, 3, 5};
  config.baseline = "Strivers";
  const std::string canonical = config_json(config);
  RunConfig parsed = parse_config(canonical);
  // execution environment is not part of the canonical form
  CHECK(parsed.output_dir == "out");
  parsed.output_dir = config.output_dir;
  parsed.threads = config.threads;
  CHECK(config_json(parsed) == canonical);
  CHECK(parsed.synth_preset == "fig1a");
  CHECK(parsed.models == std::vector<int>{1, 3, 5});
  CHECK(parsed.baseline == "Strivers");
  CHECK(parsed.seed_explicit);
}

TEST_CASE("config errors name the offending key") {
  try {
    parse_config(R"({"clutser_k": 7})");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(std::string(e.what()).find("clutser_k") != std::string::npos);
  }
  const std::string preset_inputs = R"("inputs": {"synth_preset": "fig1a"})";
  CHECK_THROWS_AS(parse_config("{" + preset_inputs + R"(, "cluster": {"k": "seven"}})"), Error);
  CHECK_THROWS_AS(parse_config("not json"), Error);
  CHECK_THROWS_AS(parse_config("{" + preset_inputs + R"(, "features": {"gpa_mode": "bogus"}})"),
                  Error);
  // a config must name its inputs
  CHECK_THROWS_AS(parse_config(R"({"seed": 4})"), Error);
  // preset and file paths are mutually exclusive
  CHECK_THROWS_AS(
      parse_config(
          R"({"inputs": {"synth_preset": "fig1a", "secondary": "a.csv", "enrollment": "b.csv"}})"),
      Error);

  RunConfig cohort =
      parse_config("{" + preset_inputs + R"(, "features": {"gpa_mode": "cohort"}})");
  CHECK(cohort.features.gpa_mode == GpaMode::Cohort);
  RunConfig intra =
      parse_config("{" + preset_inputs + R"(, "features": {"gpa_mode": "intra_school"}})");
  CHECK(intra.features.gpa_mode == GpaMode::IntraSchool);
}
