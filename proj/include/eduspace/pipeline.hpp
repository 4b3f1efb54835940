#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/config.hpp"
#include "eduspace/design.hpp"
#include "eduspace/features.hpp"
#include "eduspace/ingest.hpp"
#include "eduspace/kmeans.hpp"
#include "eduspace/migration.hpp"
#include "eduspace/pca.hpp"

namespace eduspace {

/// Pipeline stages in execution order. Running a stage runs every stage
/// before it: each one consumes the previous stage's in-memory products, so a
/// prefix is the only coherent unit of work.
enum class Stage { Synth, Ingest, Features, Cluster, Space, Migrate, Fit, Report };

Stage stage_from_string(const std::string& name);
const char* to_string(Stage stage);

/// In-memory products of a run, kept so callers can inspect results without
/// re-reading artifacts. Fields are meaningful up to the stage that ran.
struct PipelineResult {
  Stage last_stage = Stage::Report;

  int64_t rejected_rows = 0;
  JoinReport join;
  std::vector<StudentTrajectory> trajectories;

  FeatureBuildResult features;
  Eigen::MatrixXd feature_mat;  // one row per retained student

  KMeansModel<double> cluster;
  std::vector<std::string> cluster_names;  // archetypes when k == 7, else C1..Ck
  ValidationCurve curve;
  bool scanned = false;

  SpaceModel<double> space;
  Eigen::MatrixXd coords;  // n x 2

  RateTable rates;
  RateTable rates_by_year;
  MigrationMatrix matrix;
  int64_t metro_removed = 0;
  int64_t enrolled_records = 0;  // post-exclusion records feeding the matrix

  LadderResult ladder;

  std::vector<std::string> artifacts;  // relative to the output dir, manifest order
  std::vector<std::string> notices;
};

/// Executes the pipeline through `last_stage`, writing every stage artifact
/// plus manifest.json into config.output_dir. All randomness derives from
/// config.seed. Throws Error; callers map codes to exit codes via
/// exit_code_for.
PipelineResult run_pipeline(const RunConfig& config, Stage last_stage = Stage::Report);

}  // namespace eduspace
