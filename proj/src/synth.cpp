#include "eduspace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"
#include "eduspace/rng.hpp"

namespace eduspace {

namespace {

constexpr std::array<const char*, 8> kCareerAreas = {
    "Medicine", "Law", "Engineering", "Anthropology",
    "Business", "Education", "Health", "Technical",
};

// enrollment mix by academic tier; each row sums to 1
constexpr std::array<std::array<double, 8>, 3> kCareerWeights = {{
    {0.02, 0.03, 0.05, 0.08, 0.10, 0.22, 0.15, 0.35},  // low
    {0.08, 0.10, 0.15, 0.07, 0.15, 0.15, 0.15, 0.15},  // mid
    {0.25, 0.15, 0.25, 0.05, 0.10, 0.05, 0.10, 0.05},  // high
}};

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double logistic(double lp) { return 1.0 / (1.0 + std::exp(-lp)); }

std::string padded_id(const char* prefix, int64_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(value));
  return buf;
}

void validate(const SynthConfig& config) {
  if (config.n_students < 1) throw Error(ErrorCode::InvalidConfig, "n_students must be positive");
  if (config.n_schools < 1) throw Error(ErrorCode::InvalidConfig, "n_schools must be positive");
  if (config.n_regions < 2 || config.n_regions > 16) {
    throw Error(ErrorCode::InvalidConfig, "n_regions must be in [2, 16]");
  }
  if (config.year_hi < config.year_lo) {
    throw Error(ErrorCode::InvalidConfig, "year window is empty");
  }
  if (config.enroll_prob < 0 || config.enroll_prob > 1) {
    throw Error(ErrorCode::InvalidConfig, "enroll_prob must be in [0, 1]");
  }
  if (config.mode == SynthMode::Mixture) {
    if (config.components.empty()) {
      throw Error(ErrorCode::InvalidConfig, "mixture needs at least one component");
    }
    double total = 0;
    for (const auto& c : config.components) {
      if (c.weight < 0) throw Error(ErrorCode::InvalidConfig, "component weight negative");
      if (c.cov_scale <= 0) throw Error(ErrorCode::InvalidConfig, "cov_scale must be positive");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidConfig, "component weights must sum to 1");
    }
  }
  if (!config.migration.cluster_offsets.empty() &&
      config.migration.cluster_offsets.size() !=
          std::max<size_t>(1, config.components.size())) {
    throw Error(ErrorCode::InvalidConfig, "cluster_offsets must align with components");
  }
}

}  // namespace

SynthCohort generate(const SynthConfig& config) {
  validate(config);
  const int64_t n = config.n_students;
  const int years = config.year_hi - config.year_lo + 1;

  std::vector<double> weights;
  for (const auto& c : config.components) weights.push_back(c.weight);

  SynthCohort cohort;
  cohort.secondary.reserve(static_cast<size_t>(n));
  cohort.truth.cluster.resize(static_cast<size_t>(n), 0);
  cohort.truth.performance.resize(static_cast<size_t>(n));
  cohort.truth.ses.resize(static_cast<size_t>(n));
  cohort.truth.migration_prob.resize(static_cast<size_t>(n));
  cohort.truth.enrolled.resize(static_cast<size_t>(n));
  cohort.truth.migrated.resize(static_cast<size_t>(n));

  for (int64_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(config.seed, static_cast<uint64_t>(i));

    std::array<double, 6> x{};
    int component = 0;
    if (config.mode == SynthMode::Mixture) {
      component = static_cast<int>(rng.weighted(weights));
      const auto& spec = config.components[static_cast<size_t>(component)];
      for (int f = 0; f < 6; ++f) {
        x[static_cast<size_t>(f)] =
            clip01(spec.mean[static_cast<size_t>(f)] + rng.normal(0.0, spec.cov_scale));
      }
      cohort.truth.performance[static_cast<size_t>(i)] = (x[0] + x[1] + x[2]) / 3.0;
      cohort.truth.ses[static_cast<size_t>(i)] = x[5];
    } else {
      double perf = clip01(rng.normal(0.5, 0.15));
      double ses = clip01(rng.normal(0.5, 0.15));
      x[0] = clip01(perf + rng.normal(0.0, 0.03));
      x[1] = clip01(perf + rng.normal(0.0, 0.03));
      x[2] = clip01(perf + rng.normal(0.0, 0.03));
      x[3] = clip01(0.15 + 0.7 * perf + rng.normal(0.0, 0.05));
      x[4] = clip01(0.15 + 0.7 * perf + rng.normal(0.0, 0.05));
      x[5] = clip01(ses + rng.normal(0.0, 0.03));
      cohort.truth.performance[static_cast<size_t>(i)] = perf;
      cohort.truth.ses[static_cast<size_t>(i)] = ses;
    }
    cohort.truth.cluster[static_cast<size_t>(i)] = component;

    SecondaryRecord rec;
    rec.student_id = padded_id("ST", i, 7);
    rec.cohort_year = config.year_lo + static_cast<int>(rng.below(static_cast<uint64_t>(years)));
    rec.home_region = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(config.n_regions)));
    double school_quality = (x[3] + x[4]) / 2.0;
    int school = std::min(config.n_schools - 1,
                          static_cast<int>(school_quality * config.n_schools));
    rec.school_id = padded_id("S", school, 3);
    rec.reading_score = kSynthScoreLo + (kSynthScoreHi - kSynthScoreLo) * x[0];
    rec.math_score = kSynthScoreLo + (kSynthScoreHi - kSynthScoreLo) * x[1];
    rec.gpa = kSynthGpaLo + (kSynthGpaHi - kSynthGpaLo) * x[2];
    rec.family_income = kSynthIncomeBase * std::exp(kSynthIncomeSpread * x[5]);

    // draw everything regardless of enrollment so streams stay aligned
    double perf = cohort.truth.performance[static_cast<size_t>(i)];
    int tier = perf >= 0.7 ? 2 : perf >= 0.4 ? 1 : 0;
    const auto& career_weights = kCareerWeights[static_cast<size_t>(tier)];
    size_t career = rng.weighted(std::vector<double>(career_weights.begin(), career_weights.end()));
    bool enrolled = rng.uniform() < config.enroll_prob;

    double lp = config.migration.intercept;
    for (int f = 0; f < 6; ++f) {
      lp += config.migration.feature_coeffs[static_cast<size_t>(f)] * x[static_cast<size_t>(f)];
    }
    if (!config.migration.cluster_offsets.empty()) {
      lp += config.migration.cluster_offsets[static_cast<size_t>(component)];
    }
    bool migrated;
    double prob;
    if (config.migration.mode == MigrationMode::Logistic) {
      prob = logistic(lp);
      migrated = rng.uniform() < prob;
    } else {
      rng.uniform();  // keep the stream aligned with Logistic mode
      migrated = lp > 0;
      prob = migrated ? 1.0 : 0.0;
    }
    int destination = rec.home_region;
    uint64_t hop = rng.below(static_cast<uint64_t>(config.n_regions - 1));
    if (migrated) {
      destination = 1 + static_cast<int>((static_cast<uint64_t>(rec.home_region - 1) + 1 + hop) %
                                         static_cast<uint64_t>(config.n_regions));
    }

    cohort.truth.migration_prob[static_cast<size_t>(i)] = prob;
    cohort.truth.enrolled[static_cast<size_t>(i)] = enrolled ? 1 : 0;
    cohort.truth.migrated[static_cast<size_t>(i)] = (enrolled && migrated) ? 1 : 0;

    if (enrolled) {
      EnrollmentRecord enr;
      enr.student_id = rec.student_id;
      enr.enroll_year = rec.cohort_year;
      enr.institution_id = padded_id("U", destination, 2);
      enr.campus_region = destination;
      enr.career_area = kCareerAreas[career];
      enr.career_name = enr.career_area;
      enr.degree_level =
          career == 7 ? DegreeLevel::Technical : DegreeLevel::Professional;
      cohort.enrollment.push_back(std::move(enr));
    }
    cohort.secondary.push_back(std::move(rec));
  }
  return cohort;
}

SynthConfig synth_preset(const std::string& name) {
  SynthConfig config;
  auto logit = [](double p) { return std::log(p / (1.0 - p)); };

  if (name == "fig1a") {
    config.n_students = 30000;
    config.seed = 7;
    config.components = {
        {"Achievers", 0.14, {0.92, 0.92, 0.93, 0.92, 0.92, 0.92}, 0.05},
        {"Strivers", 0.14, {0.85, 0.85, 0.84, 0.82, 0.82, 0.20}, 0.05},
        {"Atypical", 0.14, {0.50, 0.50, 0.88, 0.25, 0.25, 0.50}, 0.05},
        {"Privileged", 0.14, {0.55, 0.55, 0.60, 0.86, 0.86, 0.90}, 0.05},
        {"Challenged", 0.14, {0.45, 0.45, 0.42, 0.78, 0.78, 0.15}, 0.05},
        {"Resilient", 0.14, {0.25, 0.25, 0.50, 0.40, 0.40, 0.78}, 0.05},
        {"Disadvantaged", 0.16, {0.10, 0.10, 0.10, 0.15, 0.15, 0.05}, 0.05},
    };
    config.migration.intercept = -1.2;
    config.migration.feature_coeffs = {1.0, 1.0, 0.5, 0.4, 0.4, 1.2};
    config.migration.cluster_offsets = {0.0, -0.2, 0.3, -0.3, 0.2, 0.25, 0.4};
    return config;
  }
  if (name == "twofactor") {
    config.mode = SynthMode::TwoFactor;
    config.n_students = 20000;
    config.seed = 11;
    config.migration.intercept = -1.0;
    config.migration.feature_coeffs = {0.8, 0.8, 0.4, 0.3, 0.3, 0.8};
    return config;
  }
  if (name == "rates3") {
    config.n_students = 30000;
    config.seed = 3;
    config.components = {
        {"C0", 1.0 / 3, {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}, 0.05},
        {"C1", 1.0 / 3, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, 0.05},
        {"C2", 1.0 / 3, {0.8, 0.8, 0.8, 0.8, 0.8, 0.8}, 0.05},
    };
    config.migration.intercept = 0;
    config.migration.cluster_offsets = {logit(0.1), logit(0.4), logit(0.7)};
    return config;
  }
  if (name == "separable") {
    config.n_students = 4000;
    config.seed = 5;
    config.enroll_prob = 1.0;
    // one cohort year keeps the percentile transform a single monotone map,
    // so the threshold rule stays linearly separable after feature building
    config.year_lo = 2022;
    config.year_hi = 2022;
    config.components = {
        {"Low", 0.5, {0.35, 0.35, 0.35, 0.35, 0.35, 0.35}, 0.05},
        {"High", 0.5, {0.65, 0.65, 0.65, 0.65, 0.65, 0.65}, 0.05},
    };
    config.migration.mode = MigrationMode::Threshold;
    config.migration.intercept = -0.5;
    config.migration.feature_coeffs = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    return config;
  }
  if (name == "blobs3") {
    config.n_students = 6000;
    config.seed = 13;
    config.components = {
        {"B0", 1.0 / 3, {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}, 0.03},
        {"B1", 1.0 / 3, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, 0.03},
        {"B2", 1.0 / 3, {0.8, 0.8, 0.8, 0.8, 0.8, 0.8}, 0.03},
    };
    config.migration.intercept = -1.0;
    config.migration.feature_coeffs = {0.5, 0.5, 0.2, 0.2, 0.2, 0.5};
    return config;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown synth preset: " + name);
}

double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "labelings differ in length");
  }
  const int64_t n = static_cast<int64_t>(truth.size());
  if (n == 0) throw Error(ErrorCode::LengthMismatch, "labelings are empty");

  std::map<std::pair<int, int>, int64_t> cells;
  std::map<int, int64_t> row_sums, col_sums;
  for (size_t i = 0; i < truth.size(); ++i) {
    cells[{truth[i], predicted[i]}] += 1;
    row_sums[truth[i]] += 1;
    col_sums[predicted[i]] += 1;
  }
  auto pairs = [](int64_t c) { return 0.5 * static_cast<double>(c) * static_cast<double>(c - 1); };

  double index = 0;
  for (const auto& [key, count] : cells) index += pairs(count);
  double rows = 0, cols = 0;
  for (const auto& [key, count] : row_sums) rows += pairs(count);
  for (const auto& [key, count] : col_sums) cols += pairs(count);
  double total = pairs(n);
  double expected = rows * cols / total;
  double maximum = 0.5 * (rows + cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

void write_synth_csvs(const SynthCohort& cohort, const std::string& dir) {
  std::filesystem::create_directories(dir);

  CsvWriter secondary(dir + "/secondary.csv");
  secondary.write_row({"student_id", "cohort_year", "home_region", "school_id", "math_score",
                       "reading_score", "gpa", "family_income"});
  for (const auto& r : cohort.secondary) {
    secondary.write_row({r.student_id, format_int(r.cohort_year), format_int(r.home_region),
                         r.school_id, format_double(r.math_score), format_double(r.reading_score),
                         format_double(r.gpa), format_double(r.family_income)});
  }
  secondary.close();

  CsvWriter enrollment(dir + "/enrollment.csv");
  enrollment.write_row({"student_id", "enroll_year", "institution_id", "campus_region",
                        "career_name", "career_area", "degree_level"});
  for (const auto& e : cohort.enrollment) {
    enrollment.write_row({e.student_id, format_int(e.enroll_year), e.institution_id,
                          format_int(e.campus_region), e.career_name, e.career_area,
                          to_string(e.degree_level)});
  }
  enrollment.close();

  CsvWriter truth(dir + "/ground_truth.csv");
  truth.write_row({"student_id", "cluster", "performance", "ses", "migration_prob", "enrolled",
                   "migrated"});
  for (size_t i = 0; i < cohort.secondary.size(); ++i) {
    truth.write_row({cohort.secondary[i].student_id, format_int(cohort.truth.cluster[i]),
                     format_double(cohort.truth.performance[i]),
                     format_double(cohort.truth.ses[i]),
                     format_double(cohort.truth.migration_prob[i]),
                     format_int(static_cast<int>(cohort.truth.enrolled[i])),
                     format_int(static_cast<int>(cohort.truth.migrated[i]))});
  }
  truth.close();
}

}  // namespace eduspace
