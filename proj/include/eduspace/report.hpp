#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/kde.hpp"
#include "eduspace/migration.hpp"

namespace eduspace {

/// Each writer emits one figure analogue as SVG plus the underlying CSV into
/// `dir` and returns the artifact file names (relative to dir) for the run
/// manifest.

/// Cluster composition bars: one bar per cluster, counts summing to n.
std::vector<std::string> write_composition(const std::string& dir,
                                           const std::vector<int>& assignments,
                                           const std::vector<std::string>& cluster_names);

/// Centroid-by-feature table with per-cell shading.
std::vector<std::string> write_centroid_table(const std::string& dir,
                                              const Eigen::MatrixXd& centroids,
                                              const std::vector<std::string>& cluster_names);

/// 2-D projection scatter colored by cluster; at most max_points are drawn,
/// chosen by a seeded subsample so the figure is reproducible.
std::vector<std::string> write_space_scatter(const std::string& dir,
                                             const Eigen::MatrixXd& coords,
                                             const std::vector<int>& assignments,
                                             const std::vector<std::string>& cluster_names,
                                             int64_t max_points = 20000, uint64_t seed = 0);

struct DensityPanelResult {
  std::vector<std::string> artifacts;
  std::vector<std::string> notices;  // panels omitted for lack of points
};

/// One density panel per requested career over shared bounds and a shared
/// color scale. careers_by_student aligns with coords rows; students without
/// a career never enter a panel. Careers with fewer than 2 points are
/// omitted with a notice instead of an error.
DensityPanelResult write_density_panels(const std::string& dir, const Eigen::MatrixXd& coords,
                                        const std::vector<std::string>& careers_by_student,
                                        const std::vector<std::string>& careers,
                                        int grid_size = 200, double bandwidth = 0,
                                        int threads = 1);

/// Cluster shares within each career; shares sum to 1 per career.
std::vector<std::string> write_program_shares(const std::string& dir,
                                              const std::vector<MigrationRecord>& records);

/// Rate table CSV (suppressed groups keep their keys but no counts) and the
/// region-by-region heatmap with rows ordered by out-migration rate.
std::vector<std::string> write_migration_report(const std::string& dir, const RateTable& rates,
                                                const RateTable& rates_by_year,
                                                const MigrationMatrix& matrix);

}  // namespace eduspace
