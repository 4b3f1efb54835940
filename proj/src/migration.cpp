#include "eduspace/migration.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "eduspace/error.hpp"

namespace eduspace {

bool is_valid_region(int code) { return code >= kMinRegion && code <= kMaxRegion; }

bool migration_flag(int home_region, int campus_region) {
  if (!is_valid_region(home_region)) {
    throw Error(ErrorCode::UnknownRegion, "home region " + std::to_string(home_region));
  }
  if (!is_valid_region(campus_region)) {
    throw Error(ErrorCode::UnknownRegion, "campus region " + std::to_string(campus_region));
  }
  return home_region != campus_region;
}

std::vector<MigrationRecord> build_migration_records(
    const std::vector<StudentTrajectory>& trajectories,
    const std::vector<std::string>& cluster_labels) {
  if (!cluster_labels.empty() && cluster_labels.size() != trajectories.size()) {
    throw Error(ErrorCode::LengthMismatch, "cluster labels do not align with trajectories");
  }
  std::vector<MigrationRecord> records;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    if (!t.enrollment) continue;
    MigrationRecord r;
    r.student_id = t.secondary.student_id;
    r.home_region = t.secondary.home_region;
    r.campus_region = t.enrollment->campus_region;
    r.migrated = migration_flag(r.home_region, r.campus_region);
    if (!cluster_labels.empty()) r.cluster_label = cluster_labels[i];
    r.career_area = t.enrollment->career_area;
    r.enroll_year = t.enrollment->enroll_year;
    records.push_back(std::move(r));
  }
  return records;
}

RateTable migration_rates(const std::vector<MigrationRecord>& records,
                          const std::vector<GroupKey>& group_by, int64_t min_cell) {
  RateTable table;
  table.group_by = group_by;
  table.min_cell = min_cell;

  auto key_of = [&](const MigrationRecord& r) {
    std::tuple<std::string, std::string, int, int> key{"", "", -1, -1};
    for (GroupKey g : group_by) {
      switch (g) {
        case GroupKey::Cluster: std::get<0>(key) = r.cluster_label; break;
        case GroupKey::CareerArea: std::get<1>(key) = r.career_area; break;
        case GroupKey::HomeRegion: std::get<2>(key) = r.home_region; break;
        case GroupKey::EnrollYear: std::get<3>(key) = r.enroll_year; break;
      }
    }
    return key;
  };

  std::map<std::tuple<std::string, std::string, int, int>, std::pair<int64_t, int64_t>> groups;
  for (const auto& r : records) {
    auto& cell = groups[key_of(r)];
    cell.second += 1;
    if (r.migrated) cell.first += 1;
  }

  for (const auto& [key, cell] : groups) {
    RateRow row;
    row.cluster_label = std::get<0>(key);
    row.career_area = std::get<1>(key);
    row.home_region = std::get<2>(key);
    row.enroll_year = std::get<3>(key);
    row.numerator = cell.first;
    row.denominator = cell.second;
    row.rate = static_cast<double>(cell.first) / static_cast<double>(cell.second);
    row.suppressed = cell.second < min_cell;
    table.rows.push_back(std::move(row));
  }
  return table;
}

ExclusionResult exclude_metropolitan(const std::vector<MigrationRecord>& records,
                                     int metro_code) {
  ExclusionResult result;
  for (const auto& r : records) {
    if (r.home_region == metro_code) {
      ++result.removed;
    } else {
      result.records.push_back(r);
    }
  }
  return result;
}

MigrationMatrix migration_matrix(const std::vector<MigrationRecord>& records) {
  std::map<int, int> index_of;  // region code -> dense index, code order first
  for (const auto& r : records) {
    index_of.emplace(r.home_region, 0);
    index_of.emplace(r.campus_region, 0);
  }
  std::vector<int> regions;
  for (auto& [code, idx] : index_of) {
    idx = static_cast<int>(regions.size());
    regions.push_back(code);
  }
  const int m = static_cast<int>(regions.size());

  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> counts =
      Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
  for (const auto& r : records) {
    counts(index_of[r.home_region], index_of[r.campus_region]) += 1;
  }

  std::vector<double> out_rate(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    int64_t total = counts.row(i).sum();
    if (total > 0) {
      out_rate[static_cast<size_t>(i)] =
          static_cast<double>(total - counts(i, i)) / static_cast<double>(total);
    }
  }

  std::vector<int> order(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (out_rate[static_cast<size_t>(a)] != out_rate[static_cast<size_t>(b)]) {
      return out_rate[static_cast<size_t>(a)] > out_rate[static_cast<size_t>(b)];
    }
    return regions[static_cast<size_t>(a)] < regions[static_cast<size_t>(b)];
  });

  MigrationMatrix result;
  result.regions.resize(static_cast<size_t>(m));
  result.out_rate.resize(static_cast<size_t>(m));
  result.counts.resize(m, m);
  for (int i = 0; i < m; ++i) {
    result.regions[static_cast<size_t>(i)] = regions[static_cast<size_t>(order[static_cast<size_t>(i)])];
    result.out_rate[static_cast<size_t>(i)] = out_rate[static_cast<size_t>(order[static_cast<size_t>(i)])];
    for (int j = 0; j < m; ++j) {
      result.counts(i, j) = counts(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
  }
  return result;
}

}  // namespace eduspace
