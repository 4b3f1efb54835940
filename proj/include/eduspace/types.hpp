#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace eduspace {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class DegreeLevel { Professional, Technical };

inline const char* to_string(DegreeLevel level) {
  return level == DegreeLevel::Professional ? "professional" : "technical";
}

// Missing numeric inputs are carried as NaN through ingest and excluded (and
// counted) when features are built.
inline bool is_missing(double v) { return std::isnan(v); }

struct SecondaryRecord {
  std::string student_id;
  int cohort_year = 0;
  int home_region = 0;
  std::string school_id;
  double math_score = std::nan("");
  double reading_score = std::nan("");
  double gpa = std::nan("");
  double family_income = std::nan("");
  size_t source_line = 0;
};

struct EnrollmentRecord {
  std::string student_id;
  int enroll_year = 0;
  std::string institution_id;
  int campus_region = 0;
  std::string career_name;
  std::string career_area;
  DegreeLevel degree_level = DegreeLevel::Professional;
  size_t source_line = 0;
};

struct StudentTrajectory {
  SecondaryRecord secondary;
  std::optional<EnrollmentRecord> enrollment;
};

// Fixed feature order used by every downstream matrix.
constexpr std::array<const char*, 6> kFeatureNames = {
    "lang_pct", "math_pct", "gpa_pct", "school_lang_pct", "school_math_pct", "income_scaled"};
constexpr int kLangIdx = 0;
constexpr int kMathIdx = 1;
constexpr int kGpaIdx = 2;
constexpr int kSchoolLangIdx = 3;
constexpr int kSchoolMathIdx = 4;
constexpr int kIncomeIdx = 5;

struct FeatureVector {
  std::string student_id;
  int cohort_year = 0;
  double lang_pct = 0;
  double math_pct = 0;
  double gpa_pct = 0;
  double school_lang_pct = 0;
  double school_math_pct = 0;
  double income_scaled = 0;

  double operator[](int i) const {
    switch (i) {
      case kLangIdx: return lang_pct;
      case kMathIdx: return math_pct;
      case kGpaIdx: return gpa_pct;
      case kSchoolLangIdx: return school_lang_pct;
      case kSchoolMathIdx: return school_math_pct;
      default: return income_scaled;
    }
  }
};

struct SchoolScore {
  std::string school_id;
  int cohort_year = 0;
  double overall = 0;  // median of the students' averaged math/reading scores
  int rank = 0;
  int n_students = 0;
  // per-subject medians feeding the school percentile features
  double median_math = 0;
  double median_lang = 0;
};

inline Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), 6);
  for (size_t i = 0; i < features.size(); ++i) {
    for (int j = 0; j < 6; ++j) m(static_cast<Eigen::Index>(i), j) = features[i][j];
  }
  return m;
}

}  // namespace eduspace
