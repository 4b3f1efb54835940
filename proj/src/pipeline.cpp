#include "eduspace/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "eduspace/archetype.hpp"
#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"
#include "eduspace/manifest.hpp"
#include "eduspace/parallel.hpp"
#include "eduspace/report.hpp"
#include "eduspace/rng.hpp"
#include "eduspace/synth.hpp"

namespace eduspace {
namespace {

using nlohmann::json;

bool runs(Stage last, Stage stage) { return static_cast<int>(last) >= static_cast<int>(stage); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out.good()) throw Error(ErrorCode::IoError, "short write to " + path);
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json feature_names_json() {
  json names = json::array();
  for (const char* name : kFeatureNames) names.push_back(name);
  return names;
}

std::string row_key(const std::string& student_id, int cohort_year) {
  return student_id + '\x1f' + std::to_string(cohort_year);
}

}  // namespace

Stage stage_from_string(const std::string& name) {
  if (name == "synth") return Stage::Synth;
  if (name == "ingest") return Stage::Ingest;
  if (name == "features") return Stage::Features;
  if (name == "cluster") return Stage::Cluster;
  if (name == "space") return Stage::Space;
  if (name == "migrate") return Stage::Migrate;
  if (name == "fit") return Stage::Fit;
  if (name == "report") return Stage::Report;
  throw Error(ErrorCode::InvalidConfig, "unknown stage '" + name + "'");
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Synth: return "synth";
    case Stage::Ingest: return "ingest";
    case Stage::Features: return "features";
    case Stage::Cluster: return "cluster";
    case Stage::Space: return "space";
    case Stage::Migrate: return "migrate";
    case Stage::Fit: return "fit";
    default: return "report";
  }
}

PipelineResult run_pipeline(const RunConfig& config, Stage last_stage) {
  PipelineResult result;
  result.last_stage = last_stage;

  if (config.synth_preset.empty() &&
      (config.secondary_path.empty() || config.enrollment_path.empty())) {
    throw Error(ErrorCode::InvalidConfig,
                "inputs need secondary and enrollment paths or a synth preset");
  }
  if (!config.synth_preset.empty() &&
      (!config.secondary_path.empty() || !config.enrollment_path.empty())) {
    throw Error(ErrorCode::InvalidConfig, "a synth preset excludes input file paths");
  }

  const std::string out = config.output_dir;
  std::error_code fs_error;
  std::filesystem::create_directories(out, fs_error);
  if (fs_error) {
    throw Error(ErrorCode::IoError, "cannot create output dir " + out + ": " + fs_error.message());
  }

  RunManifest manifest(out, config_json(config), config.seed, config.emit_timestamps);
  auto emit = [&](const std::string& relative) {
    manifest.add_artifact(relative);
    result.artifacts.push_back(relative);
  };
  const int threads = resolve_threads(config.threads);

  // synth: generated inputs are artifacts; file inputs are hashed as inputs
  std::string secondary_path = config.secondary_path;
  std::string enrollment_path = config.enrollment_path;
  if (!config.synth_preset.empty()) {
    SynthConfig synth = synth_preset(config.synth_preset);
    if (config.synth_n > 0) synth.n_students = config.synth_n;
    if (config.seed_explicit) synth.seed = config.seed;
    SynthCohort cohort = generate(synth);
    write_synth_csvs(cohort, out);
    emit("secondary.csv");
    emit("enrollment.csv");
    emit("ground_truth.csv");
    secondary_path = out + "/secondary.csv";
    enrollment_path = out + "/enrollment.csv";
    result.notices.push_back("synth: preset '" + config.synth_preset + "', n=" +
                             std::to_string(synth.n_students) + ", seed=" +
                             std::to_string(synth.seed));
  } else {
    manifest.add_input(secondary_path);
    manifest.add_input(enrollment_path);
  }
  if (!runs(last_stage, Stage::Ingest)) {
    manifest.write();
    return result;
  }

  // ingest
  SecondaryLoad secondary = load_secondary(secondary_path, config.secondary_schema,
                                           config.validation);
  EnrollmentLoad enrollment = load_enrollment(enrollment_path, config.enrollment_schema,
                                              config.validation);
  std::vector<Reject> rejects = secondary.rejects;
  rejects.insert(rejects.end(), enrollment.rejects.begin(), enrollment.rejects.end());
  result.rejected_rows = static_cast<int64_t>(rejects.size());
  write_rejects_csv(out + "/rejects.csv", rejects);
  emit("rejects.csv");
  result.trajectories = join_cohort(secondary.records, enrollment.records, &result.join);
  write_trajectories_csv(out + "/trajectories.csv", result.trajectories);
  emit("trajectories.csv");
  result.notices.push_back(
      "ingest: " + std::to_string(secondary.raw_rows + enrollment.raw_rows) + " rows read, " +
      std::to_string(rejects.size()) + " rejected; join matched " +
      std::to_string(result.join.matched) + ", " + std::to_string(result.join.unmatched_secondary) +
      " without enrollment, " + std::to_string(result.join.orphan_enrollments) +
      " orphan enrollment ids");
  if (!runs(last_stage, Stage::Features)) {
    manifest.write();
    return result;
  }

  // features
  result.features = build_features(result.trajectories, config.features);
  write_features_csv(out + "/features.csv", result.features.features);
  write_schools_csv(out + "/schools.csv", result.features.schools);
  emit("features.csv");
  emit("schools.csv");
  if (result.features.exclusions.total() > 0) {
    const auto& e = result.features.exclusions;
    result.notices.push_back(
        "features: " + std::to_string(e.total()) + " students excluded (" +
        std::to_string(e.missing_score) + " missing score, " + std::to_string(e.missing_gpa) +
        " missing gpa, " + std::to_string(e.missing_income) + " missing income, " +
        std::to_string(e.missing_school) + " missing school, " +
        std::to_string(e.school_too_small) + " school too small)");
  }
  if (result.features.features.empty()) {
    throw Error(ErrorCode::TooFewPoints, "no students left after feature exclusions");
  }
  result.feature_mat = feature_matrix(result.features.features);
  if (!runs(last_stage, Stage::Cluster)) {
    manifest.write();
    return result;
  }

  // cluster
  KMeansOptions cluster_opt;
  cluster_opt.k = config.cluster_k;
  cluster_opt.seed = mix_seed(config.seed, 0x6b6d);
  cluster_opt.restarts = config.cluster_restarts;
  cluster_opt.tol = config.cluster_tol;
  cluster_opt.max_iter = config.cluster_max_iter;
  cluster_opt.threads = threads;
  if (config.scan_lo != 0 || config.scan_hi != 0) {
    if (config.scan_lo < 2 || config.scan_hi < config.scan_lo) {
      throw Error(ErrorCode::InvalidConfig, "cluster.scan bounds need 2 <= lo <= hi");
    }
    result.curve = scan_k(result.feature_mat, config.scan_lo, config.scan_hi, cluster_opt,
                          config.silhouette_sample);
    result.scanned = true;
    CsvWriter curve_csv(out + "/validation_curve.csv");
    curve_csv.write_row({"k", "objective", "silhouette", "is_knee"});
    for (size_t i = 0; i < result.curve.k_values.size(); ++i) {
      curve_csv.write_row({format_int(result.curve.k_values[i]),
                           format_double(result.curve.objective_per_k[i]),
                           format_double(result.curve.silhouette_per_k[i]),
                           result.curve.k_values[i] == result.curve.knee_k ? "1" : "0"});
    }
    curve_csv.close();
    emit("validation_curve.csv");
    result.notices.push_back("cluster: scan knee at k=" + std::to_string(result.curve.knee_k));
  }
  result.cluster = kmeans<double>(result.feature_mat, cluster_opt);
  std::vector<Archetype> archetype_of_cluster;
  if (config.cluster_k == 7) {
    auto labels = label_archetypes(result.cluster.centroids);
    archetype_of_cluster.assign(labels.begin(), labels.end());
    for (Archetype a : labels) result.cluster_names.push_back(to_string(a));
  } else {
    for (int c = 0; c < config.cluster_k; ++c) {
      result.cluster_names.push_back("C" + std::to_string(c + 1));
    }
  }

  json cluster_doc;
  cluster_doc["k"] = result.cluster.k;
  cluster_doc["seed"] = result.cluster.seed;
  cluster_doc["restarts"] = result.cluster.restarts;
  cluster_doc["tol"] = config.cluster_tol;
  cluster_doc["max_iter"] = config.cluster_max_iter;
  cluster_doc["objective"] = result.cluster.objective;
  cluster_doc["n_iterations"] = result.cluster.n_iterations;
  cluster_doc["best_restart"] = result.cluster.best_restart;
  cluster_doc["archetype_rule_version"] = kArchetypeRuleVersion;
  cluster_doc["feature_names"] = feature_names_json();
  cluster_doc["labels"] = result.cluster_names;
  cluster_doc["centroids"] = matrix_json(result.cluster.centroids);
  if (result.scanned) {
    cluster_doc["scan"] = {{"k", result.curve.k_values},
                           {"objective", result.curve.objective_per_k},
                           {"silhouette", result.curve.silhouette_per_k},
                           {"knee_k", result.curve.knee_k}};
  }
  write_text(out + "/cluster_model.json", cluster_doc.dump(2) + "\n");
  emit("cluster_model.json");

  {
    CsvWriter assignments_csv(out + "/assignments.csv");
    assignments_csv.write_row({"student_id", "cohort_year", "cluster", "label"});
    for (size_t i = 0; i < result.features.features.size(); ++i) {
      const auto& f = result.features.features[i];
      const int c = result.cluster.assignments[i];
      assignments_csv.write_row({f.student_id, format_int(f.cohort_year), format_int(c),
                                 result.cluster_names[static_cast<size_t>(c)]});
    }
    assignments_csv.close();
    emit("assignments.csv");
  }
  if (!runs(last_stage, Stage::Space)) {
    manifest.write();
    return result;
  }

  // space
  result.space = fit_space<double>(result.feature_mat);
  result.coords = project(result.space, result.feature_mat);

  json space_doc;
  space_doc["feature_names"] = feature_names_json();
  space_doc["means"] = vector_json(result.space.means);
  space_doc["stds"] = vector_json(result.space.stds);
  space_doc["components"] = matrix_json(result.space.components);
  space_doc["explained_variance_ratio"] = {result.space.explained_variance_ratio[0],
                                           result.space.explained_variance_ratio[1]};
  space_doc["spectrum"] = vector_json(result.space.spectrum);
  space_doc["orientation"] = {result.space.orientation[0], result.space.orientation[1]};
  write_text(out + "/space_model.json", space_doc.dump(2) + "\n");
  emit("space_model.json");

  {
    CsvWriter coords_csv(out + "/space_coords.csv");
    coords_csv.write_row({"student_id", "cohort_year", "pc1", "pc2", "cluster", "label"});
    for (size_t i = 0; i < result.features.features.size(); ++i) {
      const auto& f = result.features.features[i];
      const int c = result.cluster.assignments[i];
      coords_csv.write_row({f.student_id, format_int(f.cohort_year),
                            format_double(result.coords(static_cast<Eigen::Index>(i), 0)),
                            format_double(result.coords(static_cast<Eigen::Index>(i), 1)),
                            format_int(c), result.cluster_names[static_cast<size_t>(c)]});
    }
    coords_csv.close();
    emit("space_coords.csv");
  }
  if (!runs(last_stage, Stage::Migrate)) {
    manifest.write();
    return result;
  }

  // migrate: label each trajectory through its feature row, when it has one
  std::unordered_map<std::string, size_t> row_of;
  row_of.reserve(result.features.features.size());
  for (size_t i = 0; i < result.features.features.size(); ++i) {
    const auto& f = result.features.features[i];
    row_of.emplace(row_key(f.student_id, f.cohort_year), i);
  }
  std::vector<std::string> trajectory_labels(result.trajectories.size());
  for (size_t t = 0; t < result.trajectories.size(); ++t) {
    const auto& s = result.trajectories[t].secondary;
    auto it = row_of.find(row_key(s.student_id, s.cohort_year));
    if (it != row_of.end()) {
      trajectory_labels[t] =
          result.cluster_names[static_cast<size_t>(result.cluster.assignments[it->second])];
    }
  }
  std::vector<MigrationRecord> all_records =
      build_migration_records(result.trajectories, trajectory_labels);
  std::vector<MigrationRecord> labeled_records;
  for (const auto& r : all_records) {
    if (!r.cluster_label.empty()) labeled_records.push_back(r);
  }

  std::vector<MigrationRecord> scope = all_records;
  std::vector<MigrationRecord> labeled_scope = labeled_records;
  if (config.exclude_metro) {
    ExclusionResult excluded = exclude_metropolitan(all_records, config.metro_code);
    result.metro_removed = excluded.removed;
    scope = std::move(excluded.records);
    labeled_scope = exclude_metropolitan(labeled_records, config.metro_code).records;
    result.notices.push_back("migration: " + std::to_string(result.metro_removed) +
                             " metropolitan-home records excluded");
  }
  result.enrolled_records = static_cast<int64_t>(scope.size());

  result.rates = migration_rates(labeled_scope, config.group_by, config.min_cell);
  std::vector<GroupKey> by_year = config.group_by;
  if (std::find(by_year.begin(), by_year.end(), GroupKey::EnrollYear) == by_year.end()) {
    by_year.push_back(GroupKey::EnrollYear);
  }
  result.rates_by_year = migration_rates(labeled_scope, by_year, config.min_cell);
  result.matrix = migration_matrix(scope);
  for (const std::string& name :
       write_migration_report(out, result.rates, result.rates_by_year, result.matrix)) {
    emit(name);
  }
  int64_t suppressed = 0;
  for (const auto& row : result.rates.rows) suppressed += row.suppressed ? 1 : 0;
  if (suppressed > 0) {
    result.notices.push_back("migration: " + std::to_string(suppressed) +
                             " rate groups suppressed (cell < " +
                             std::to_string(config.min_cell) + ")");
  }
  if (!runs(last_stage, Stage::Fit)) {
    manifest.write();
    return result;
  }

  // fit: enrolled students with features, metro homes excluded per config
  if (config.models.empty()) {
    throw Error(ErrorCode::InvalidConfig, "fit.models must name at least one model");
  }
  std::vector<Eigen::Index> sample_rows;
  std::vector<Archetype> sample_clusters;
  std::vector<uint8_t> sample_migrated;
  for (const auto& trajectory : result.trajectories) {
    if (!trajectory.enrollment.has_value()) continue;
    const auto& s = trajectory.secondary;
    if (config.exclude_metro && s.home_region == config.metro_code) continue;
    auto it = row_of.find(row_key(s.student_id, s.cohort_year));
    if (it == row_of.end()) continue;
    sample_rows.push_back(static_cast<Eigen::Index>(it->second));
    if (!archetype_of_cluster.empty()) {
      sample_clusters.push_back(
          archetype_of_cluster[static_cast<size_t>(result.cluster.assignments[it->second])]);
    }
    sample_migrated.push_back(
        migration_flag(s.home_region, trajectory.enrollment->campus_region) ? 1 : 0);
  }
  Eigen::MatrixXd sample(static_cast<Eigen::Index>(sample_rows.size()), result.feature_mat.cols());
  for (size_t i = 0; i < sample_rows.size(); ++i) {
    sample.row(static_cast<Eigen::Index>(i)) = result.feature_mat.row(sample_rows[i]);
  }
  result.ladder = model_ladder(sample, sample_clusters, sample_migrated,
                               archetype_from_string(config.baseline), config.logit);
  std::erase_if(result.ladder.models, [&](const ModelResult& m) {
    return std::find(config.models.begin(), config.models.end(), m.spec.model_id) ==
           config.models.end();
  });
  bool any_ok = false;
  for (const auto& model : result.ladder.models) {
    if (model.ok) {
      any_ok = true;
    } else {
      result.notices.push_back("fit: model " + std::to_string(model.spec.model_id) +
                               " failed: " + model.error);
    }
  }
  if (!any_ok) {
    const auto& first = result.ladder.models.front();
    throw Error(first.error_code,
                "model " + std::to_string(first.spec.model_id) + ": " + first.error);
  }
  write_text(out + "/model_comparison.txt", render_comparison_text(result.ladder));
  write_text(out + "/model_comparison.csv", render_comparison_csv(result.ladder));
  write_text(out + "/model_comparison.json", render_comparison_json(result.ladder));
  emit("model_comparison.txt");
  emit("model_comparison.csv");
  emit("model_comparison.json");
  if (!runs(last_stage, Stage::Report)) {
    manifest.write();
    return result;
  }

  // report
  for (const auto& name : write_composition(out, result.cluster.assignments,
                                            result.cluster_names)) {
    emit(name);
  }
  for (const auto& name : write_centroid_table(out, result.cluster.centroids,
                                               result.cluster_names)) {
    emit(name);
  }
  for (const auto& name : write_space_scatter(out, result.coords, result.cluster.assignments,
                                              result.cluster_names, 20000, config.seed)) {
    emit(name);
  }
  std::vector<std::string> careers_by_row(result.features.features.size());
  for (const auto& trajectory : result.trajectories) {
    if (!trajectory.enrollment.has_value()) continue;
    const auto& s = trajectory.secondary;
    auto it = row_of.find(row_key(s.student_id, s.cohort_year));
    if (it != row_of.end()) careers_by_row[it->second] = trajectory.enrollment->career_area;
  }
  DensityPanelResult panels =
      write_density_panels(out, result.coords, careers_by_row, config.careers, config.grid_size,
                           config.bandwidth, threads);
  for (const auto& name : panels.artifacts) emit(name);
  for (const auto& notice : panels.notices) result.notices.push_back(notice);
  for (const auto& name : write_program_shares(out, labeled_records)) emit(name);

  std::string notice_text;
  for (const auto& notice : result.notices) notice_text += notice + "\n";
  write_text(out + "/notices.txt", notice_text);
  emit("notices.txt");

  manifest.write();
  return result;
}

}  // namespace eduspace
