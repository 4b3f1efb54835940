#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/types.hpp"

namespace eduspace {

// Chilean region coding
inline constexpr int kMinRegion = 1;
inline constexpr int kMaxRegion = 16;
inline constexpr int kMetropolitanRegion = 13;

bool is_valid_region(int code);

/// true iff the codes differ; throws Error{UnknownRegion} on codes outside
/// [kMinRegion, kMaxRegion].
bool migration_flag(int home_region, int campus_region);

struct MigrationRecord {
  std::string student_id;
  int home_region = 0;
  int campus_region = 0;
  bool migrated = false;
  std::string cluster_label;  // empty when clustering was not run
  std::string career_area;
  int enroll_year = 0;
};

/// One MigrationRecord per enrolled trajectory; students without an
/// enrollment are skipped. cluster_labels aligns with trajectories (pass an
/// empty vector when unavailable).
std::vector<MigrationRecord> build_migration_records(
    const std::vector<StudentTrajectory>& trajectories,
    const std::vector<std::string>& cluster_labels);

enum class GroupKey { Cluster, CareerArea, HomeRegion, EnrollYear };

struct RateRow {
  // unused keys hold "" / -1 depending on type
  std::string cluster_label;
  std::string career_area;
  int home_region = -1;
  int enroll_year = -1;
  int64_t numerator = 0;    // migrants
  int64_t denominator = 0;  // enrolled students in the group
  double rate = 0;
  bool suppressed = false;  // denominator < min_cell; rendered outputs must drop these
};

struct RateTable {
  std::vector<GroupKey> group_by;
  std::vector<RateRow> rows;  // sorted by key tuple
  int64_t min_cell = 10;
};

/// Exact migrant counting per group; an empty group_by yields one global row.
/// Groups thinner than min_cell are kept but flagged suppressed.
RateTable migration_rates(const std::vector<MigrationRecord>& records,
                          const std::vector<GroupKey>& group_by, int64_t min_cell = 10);

struct ExclusionResult {
  std::vector<MigrationRecord> records;
  int64_t removed = 0;
};

/// Drops records whose home region is the metropolitan code.
ExclusionResult exclude_metropolitan(const std::vector<MigrationRecord>& records,
                                     int metro_code = kMetropolitanRegion);

struct MigrationMatrix {
  // row i holds flows out of regions[i]; columns share the same region order
  std::vector<int> regions;
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::vector<double> out_rate;  // per row, descending (ties by region code)
};

/// (home -> campus) flow counts over every region seen in the records, rows
/// ordered by descending out-migration rate.
MigrationMatrix migration_matrix(const std::vector<MigrationRecord>& records);

}  // namespace eduspace
