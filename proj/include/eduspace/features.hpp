#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/types.hpp"

namespace eduspace {

/// S_i = (M_i + R_i) / 2. Throws Error{NonFinite} on non-finite input.
double student_overall_score(double math, double reading);

/// Median of the students' overall scores; even lengths average the two
/// middle values. Throws Error{EmptySchool} on an empty list.
double school_performance(const std::vector<double>& scores);

/// Fills ranks by descending overall score, competition style.
std::vector<SchoolScore> rank_schools(std::vector<SchoolScore> schools);

/// Mid-rank empirical CDF over the list; see stats.hpp.
std::vector<double> percentile_transform(const std::vector<double>& values);

enum class GpaMode { Cohort, IntraSchool };

struct FeatureOptions {
  GpaMode gpa_mode = GpaMode::Cohort;
  int min_school_size = 1;
};

struct ExclusionCounts {
  size_t missing_score = 0;   // math or reading absent
  size_t missing_gpa = 0;
  size_t missing_income = 0;
  size_t missing_school = 0;  // empty school id
  size_t school_too_small = 0;
  size_t total() const {
    return missing_score + missing_gpa + missing_income + missing_school + school_too_small;
  }
};

struct FeatureBuildResult {
  std::vector<FeatureVector> features;
  std::vector<SchoolScore> schools;  // ranked, per (school, year)
  ExclusionCounts exclusions;
};

/// Builds the six normalized features per student, everything within
/// cohort_year: individual mid-rank percentiles for language/math/GPA, the
/// school's per-subject median score ranked as a percentile among that
/// year's schools, and min-max scaled family income. Rows with any missing
/// input are excluded and counted.
FeatureBuildResult build_features(const std::vector<StudentTrajectory>& trajectories,
                                  const FeatureOptions& options = {});

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& features);
void write_schools_csv(const std::string& path, const std::vector<SchoolScore>& schools);
std::vector<FeatureVector> read_features_csv(const std::string& path);

}  // namespace eduspace
