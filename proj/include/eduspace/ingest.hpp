#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eduspace/types.hpp"

namespace eduspace {

// Logical field -> column name in the file; Ministry exports rename columns
// across years, so every name is remappable from config.
struct SecondarySchema {
  std::string student_id = "student_id";
  std::string cohort_year = "cohort_year";
  std::string home_region = "home_region";
  std::string school_id = "school_id";
  std::string math_score = "math_score";
  std::string reading_score = "reading_score";
  std::string gpa = "gpa";
  std::string family_income = "family_income";
};

struct EnrollmentSchema {
  std::string student_id = "student_id";
  std::string enroll_year = "enroll_year";
  std::string institution_id = "institution_id";
  std::string campus_region = "campus_region";
  std::string career_name = "career_name";
  std::string career_area = "career_area";
  std::string degree_level = "degree_level";
};

struct ValidationRules {
  int year_lo = 2000;
  int year_hi = 2100;
  double score_lo = 100;   // raw test points
  double score_hi = 1000;
  double gpa_lo = 1.0;
  double gpa_hi = 7.0;
  int region_lo = 1;
  int region_hi = 16;
  // repeated student_id within a cohort_year: fatal by default, rejects rows
  // past the first when set
  bool allow_duplicate_ids = false;
  // income given as a bracket label is replaced by its configured midpoint
  std::map<std::string, double> income_brackets;
};

struct Reject {
  std::string file;
  int64_t line = 0;  // 1-based row number in the file, header = 1
  std::string reason;
  std::string raw_row;
};

struct SecondaryLoad {
  std::vector<SecondaryRecord> records;
  std::vector<Reject> rejects;
  int64_t raw_rows = 0;  // data rows seen, accepted + rejected
};

struct EnrollmentLoad {
  std::vector<EnrollmentRecord> records;
  std::vector<Reject> rejects;
  int64_t raw_rows = 0;
};

/// Reads and validates one secondary-education CSV. Every data row either
/// becomes a record or lands in rejects with a reason code; order is
/// preserved. Missing numeric cells become NaN and are handled downstream;
/// malformed cells reject the row. Throws Error{MissingColumn} when the
/// header lacks a mapped column, Error{DuplicateId} per the rules, and
/// Error{IoError} when the file is unreadable.
SecondaryLoad load_secondary(const std::string& path, const SecondarySchema& schema = {},
                             const ValidationRules& rules = {});

/// Enrollment counterpart of load_secondary. Duplicate student ids are
/// expected here (multiple enrollments); join_cohort picks the first.
EnrollmentLoad load_enrollment(const std::string& path, const EnrollmentSchema& schema = {},
                               const ValidationRules& rules = {});

struct JoinReport {
  int64_t matched = 0;
  int64_t unmatched_secondary = 0;
  int64_t orphan_enrollments = 0;  // enrollment ids absent from secondary
};

/// One trajectory per secondary record. Among a student's enrollments the
/// earliest enroll_year wins; ties break professional-first, then by
/// institution_id. Output order follows the secondary records, so the join is
/// insensitive to enrollment order.
std::vector<StudentTrajectory> join_cohort(const std::vector<SecondaryRecord>& secondary,
                                           const std::vector<EnrollmentRecord>& enrollment,
                                           JoinReport* report = nullptr);

void write_rejects_csv(const std::string& path, const std::vector<Reject>& rejects);

/// Trajectory round-trip used between pipeline stages: one row per student,
/// enrollment columns empty when absent.
void write_trajectories_csv(const std::string& path,
                            const std::vector<StudentTrajectory>& trajectories);
std::vector<StudentTrajectory> read_trajectories_csv(const std::string& path);

}  // namespace eduspace
