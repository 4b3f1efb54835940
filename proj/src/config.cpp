#include "eduspace/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "eduspace/error.hpp"

namespace eduspace {

using nlohmann::json;

const char* to_string(GroupKey key) {
  switch (key) {
    case GroupKey::Cluster: return "cluster";
    case GroupKey::CareerArea: return "career_area";
    case GroupKey::HomeRegion: return "home_region";
    default: return "enroll_year";
  }
}

GroupKey group_key_from_string(const std::string& name) {
  if (name == "cluster") return GroupKey::Cluster;
  if (name == "career_area") return GroupKey::CareerArea;
  if (name == "home_region") return GroupKey::HomeRegion;
  if (name == "enroll_year") return GroupKey::EnrollYear;
  throw Error(ErrorCode::InvalidConfig, "unknown group_by key: " + name);
}

namespace {

void check_keys(const json& object, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
T get_as(const json& object, const std::string& key, T fallback, const std::string& context) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad value for '" + key + "' in " + context);
  }
}

void parse_schema(const json& object, RunConfig& config) {
  check_keys(object, {"secondary", "enrollment"}, "schema");
  if (object.contains("secondary")) {
    const auto& s = object.at("secondary");
    check_keys(s,
               {"student_id", "cohort_year", "home_region", "school_id", "math_score",
                "reading_score", "gpa", "family_income"},
               "schema.secondary");
    auto& m = config.secondary_schema;
    m.student_id = get_as<std::string>(s, "student_id", m.student_id, "schema.secondary");
    m.cohort_year = get_as<std::string>(s, "cohort_year", m.cohort_year, "schema.secondary");
    m.home_region = get_as<std::string>(s, "home_region", m.home_region, "schema.secondary");
    m.school_id = get_as<std::string>(s, "school_id", m.school_id, "schema.secondary");
    m.math_score = get_as<std::string>(s, "math_score", m.math_score, "schema.secondary");
    m.reading_score =
        get_as<std::string>(s, "reading_score", m.reading_score, "schema.secondary");
    m.gpa = get_as<std::string>(s, "gpa", m.gpa, "schema.secondary");
    m.family_income =
        get_as<std::string>(s, "family_income", m.family_income, "schema.secondary");
  }
  if (object.contains("enrollment")) {
    const auto& e = object.at("enrollment");
    check_keys(e,
               {"student_id", "enroll_year", "institution_id", "campus_region", "career_name",
                "career_area", "degree_level"},
               "schema.enrollment");
    auto& m = config.enrollment_schema;
    m.student_id = get_as<std::string>(e, "student_id", m.student_id, "schema.enrollment");
    m.enroll_year = get_as<std::string>(e, "enroll_year", m.enroll_year, "schema.enrollment");
    m.institution_id =
        get_as<std::string>(e, "institution_id", m.institution_id, "schema.enrollment");
    m.campus_region =
        get_as<std::string>(e, "campus_region", m.campus_region, "schema.enrollment");
    m.career_name = get_as<std::string>(e, "career_name", m.career_name, "schema.enrollment");
    m.career_area = get_as<std::string>(e, "career_area", m.career_area, "schema.enrollment");
    m.degree_level =
        get_as<std::string>(e, "degree_level", m.degree_level, "schema.enrollment");
  }
}

void parse_validation(const json& object, ValidationRules& rules) {
  check_keys(object,
             {"year_lo", "year_hi", "score_lo", "score_hi", "gpa_lo", "gpa_hi", "region_lo",
              "region_hi", "allow_duplicate_ids", "income_brackets"},
             "validation");
  rules.year_lo = get_as<int>(object, "year_lo", rules.year_lo, "validation");
  rules.year_hi = get_as<int>(object, "year_hi", rules.year_hi, "validation");
  rules.score_lo = get_as<double>(object, "score_lo", rules.score_lo, "validation");
  rules.score_hi = get_as<double>(object, "score_hi", rules.score_hi, "validation");
  rules.gpa_lo = get_as<double>(object, "gpa_lo", rules.gpa_lo, "validation");
  rules.gpa_hi = get_as<double>(object, "gpa_hi", rules.gpa_hi, "validation");
  rules.region_lo = get_as<int>(object, "region_lo", rules.region_lo, "validation");
  rules.region_hi = get_as<int>(object, "region_hi", rules.region_hi, "validation");
  rules.allow_duplicate_ids =
      get_as<bool>(object, "allow_duplicate_ids", rules.allow_duplicate_ids, "validation");
  if (object.contains("income_brackets")) {
    const auto& brackets = object.at("income_brackets");
    if (!brackets.is_object()) {
      throw Error(ErrorCode::InvalidConfig, "validation.income_brackets must be an object");
    }
    for (const auto& [label, midpoint] : brackets.items()) {
      if (!midpoint.is_number()) {
        throw Error(ErrorCode::InvalidConfig,
                    "income bracket '" + label + "' midpoint must be a number");
      }
      rules.income_brackets[label] = midpoint.get<double>();
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config root must be an object");

  check_keys(doc,
             {"inputs", "output_dir", "seed", "threads", "schema", "validation", "features",
              "cluster", "space", "migration", "fit", "report"},
             "config");

  RunConfig config;
  const std::string root = "config";
  config.output_dir = get_as<std::string>(doc, "output_dir", config.output_dir, root);
  config.seed = get_as<uint64_t>(doc, "seed", config.seed, root);
  config.seed_explicit = doc.contains("seed");
  config.threads = get_as<int>(doc, "threads", config.threads, root);

  if (doc.contains("inputs")) {
    const auto& inputs = doc.at("inputs");
    check_keys(inputs, {"secondary", "enrollment", "synth_preset", "synth_n"}, "inputs");
    config.secondary_path = get_as<std::string>(inputs, "secondary", "", "inputs");
    config.enrollment_path = get_as<std::string>(inputs, "enrollment", "", "inputs");
    config.synth_preset = get_as<std::string>(inputs, "synth_preset", "", "inputs");
    config.synth_n = get_as<int64_t>(inputs, "synth_n", 0, "inputs");
  }
  if (config.synth_preset.empty() &&
      (config.secondary_path.empty() || config.enrollment_path.empty())) {
    throw Error(ErrorCode::InvalidConfig,
                "inputs needs either secondary+enrollment paths or synth_preset");
  }
  if (!config.synth_preset.empty() && !config.secondary_path.empty()) {
    throw Error(ErrorCode::InvalidConfig, "inputs.synth_preset excludes file paths");
  }

  if (doc.contains("schema")) parse_schema(doc.at("schema"), config);
  if (doc.contains("validation")) parse_validation(doc.at("validation"), config.validation);

  if (doc.contains("features")) {
    const auto& f = doc.at("features");
    check_keys(f, {"gpa_mode", "min_school_size"}, "features");
    std::string mode = get_as<std::string>(f, "gpa_mode", "cohort", "features");
    if (mode == "cohort") {
      config.features.gpa_mode = GpaMode::Cohort;
    } else if (mode == "intra_school") {
      config.features.gpa_mode = GpaMode::IntraSchool;
    } else {
      throw Error(ErrorCode::InvalidConfig, "features.gpa_mode must be cohort|intra_school");
    }
    config.features.min_school_size =
        get_as<int>(f, "min_school_size", config.features.min_school_size, "features");
  }

  if (doc.contains("cluster")) {
    const auto& c = doc.at("cluster");
    check_keys(c, {"k", "restarts", "tol", "max_iter", "scan_lo", "scan_hi",
                   "silhouette_sample"},
               "cluster");
    config.cluster_k = get_as<int>(c, "k", config.cluster_k, "cluster");
    config.cluster_restarts = get_as<int>(c, "restarts", config.cluster_restarts, "cluster");
    config.cluster_tol = get_as<double>(c, "tol", config.cluster_tol, "cluster");
    config.cluster_max_iter = get_as<int>(c, "max_iter", config.cluster_max_iter, "cluster");
    config.scan_lo = get_as<int>(c, "scan_lo", config.scan_lo, "cluster");
    config.scan_hi = get_as<int>(c, "scan_hi", config.scan_hi, "cluster");
    config.silhouette_sample =
        get_as<int64_t>(c, "silhouette_sample", config.silhouette_sample, "cluster");
  }

  if (doc.contains("space")) {
    const auto& s = doc.at("space");
    check_keys(s, {"grid_size", "bandwidth", "careers"}, "space");
    config.grid_size = get_as<int>(s, "grid_size", config.grid_size, "space");
    config.bandwidth = get_as<double>(s, "bandwidth", config.bandwidth, "space");
    if (s.contains("careers")) {
      config.careers = get_as<std::vector<std::string>>(s, "careers", config.careers, "space");
    }
  }

  if (doc.contains("migration")) {
    const auto& m = doc.at("migration");
    check_keys(m, {"exclude_metropolitan", "metropolitan_code", "min_cell", "group_by"},
               "migration");
    config.exclude_metro =
        get_as<bool>(m, "exclude_metropolitan", config.exclude_metro, "migration");
    config.metro_code = get_as<int>(m, "metropolitan_code", config.metro_code, "migration");
    config.min_cell = get_as<int64_t>(m, "min_cell", config.min_cell, "migration");
    if (m.contains("group_by")) {
      config.group_by.clear();
      for (const auto& key :
           get_as<std::vector<std::string>>(m, "group_by", {}, "migration")) {
        config.group_by.push_back(group_key_from_string(key));
      }
    }
  }

  if (doc.contains("fit")) {
    const auto& f = doc.at("fit");
    check_keys(f, {"models", "baseline", "tol", "max_iter"}, "fit");
    if (f.contains("models")) {
      config.models = get_as<std::vector<int>>(f, "models", config.models, "fit");
      for (int id : config.models) {
        if (id < 1 || id > 5) throw Error(ErrorCode::InvalidConfig, "fit.models entries in 1..5");
      }
    }
    config.baseline = get_as<std::string>(f, "baseline", config.baseline, "fit");
    config.logit.tol = get_as<double>(f, "tol", config.logit.tol, "fit");
    config.logit.max_iter = get_as<int>(f, "max_iter", config.logit.max_iter, "fit");
  }

  if (doc.contains("report")) {
    const auto& r = doc.at("report");
    check_keys(r, {"timestamps"}, "report");
    config.emit_timestamps = get_as<bool>(r, "timestamps", config.emit_timestamps, "report");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_json(const RunConfig& config) {
  json doc;
  doc["inputs"]["secondary"] = config.secondary_path;
  doc["inputs"]["enrollment"] = config.enrollment_path;
  doc["inputs"]["synth_preset"] = config.synth_preset;
  doc["inputs"]["synth_n"] = config.synth_n;
  // output_dir and threads are execution environment, not analysis inputs;
  // leaving them out keeps the config hash stable across reruns elsewhere
  doc["seed"] = config.seed;

  const auto& ss = config.secondary_schema;
  doc["schema"]["secondary"] = {{"student_id", ss.student_id},
                                {"cohort_year", ss.cohort_year},
                                {"home_region", ss.home_region},
                                {"school_id", ss.school_id},
                                {"math_score", ss.math_score},
                                {"reading_score", ss.reading_score},
                                {"gpa", ss.gpa},
                                {"family_income", ss.family_income}};
  const auto& es = config.enrollment_schema;
  doc["schema"]["enrollment"] = {{"student_id", es.student_id},
                                 {"enroll_year", es.enroll_year},
                                 {"institution_id", es.institution_id},
                                 {"campus_region", es.campus_region},
                                 {"career_name", es.career_name},
                                 {"career_area", es.career_area},
                                 {"degree_level", es.degree_level}};
  const auto& v = config.validation;
  doc["validation"] = {{"year_lo", v.year_lo},
                       {"year_hi", v.year_hi},
                       {"score_lo", v.score_lo},
                       {"score_hi", v.score_hi},
                       {"gpa_lo", v.gpa_lo},
                       {"gpa_hi", v.gpa_hi},
                       {"region_lo", v.region_lo},
                       {"region_hi", v.region_hi},
                       {"allow_duplicate_ids", v.allow_duplicate_ids},
                       {"income_brackets", v.income_brackets}};
  doc["features"] = {
      {"gpa_mode", config.features.gpa_mode == GpaMode::Cohort ? "cohort" : "intra_school"},
      {"min_school_size", config.features.min_school_size}};
  doc["cluster"] = {{"k", config.cluster_k},
                    {"restarts", config.cluster_restarts},
                    {"tol", config.cluster_tol},
                    {"max_iter", config.cluster_max_iter},
                    {"scan_lo", config.scan_lo},
                    {"scan_hi", config.scan_hi},
                    {"silhouette_sample", config.silhouette_sample}};
  doc["space"] = {{"grid_size", config.grid_size},
                  {"bandwidth", config.bandwidth},
                  {"careers", config.careers}};
  std::vector<std::string> group_by;
  for (GroupKey key : config.group_by) group_by.emplace_back(to_string(key));
  doc["migration"] = {{"exclude_metropolitan", config.exclude_metro},
                      {"metropolitan_code", config.metro_code},
                      {"min_cell", config.min_cell},
                      {"group_by", group_by}};
  doc["fit"] = {{"models", config.models},
                {"baseline", config.baseline},
                {"tol", config.logit.tol},
                {"max_iter", config.logit.max_iter}};
  doc["report"] = {{"timestamps", config.emit_timestamps}};
  return doc.dump(2) + "\n";
}

}  // namespace eduspace
