#include "eduspace/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"
#include "eduspace/rng.hpp"
#include "eduspace/svg.hpp"

namespace eduspace {

namespace {

std::string percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
  return buf;
}

std::string name_of(const std::vector<std::string>& cluster_names, int c) {
  if (c >= 0 && c < static_cast<int>(cluster_names.size())) {
    return cluster_names[static_cast<size_t>(c)];
  }
  return "cluster_" + std::to_string(c);
}

}  // namespace

std::vector<std::string> write_composition(const std::string& dir,
                                           const std::vector<int>& assignments,
                                           const std::vector<std::string>& cluster_names) {
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  std::vector<int64_t> counts(static_cast<size_t>(k), 0);
  for (int a : assignments) ++counts[static_cast<size_t>(a)];
  const auto total = static_cast<int64_t>(assignments.size());

  CsvWriter csv(dir + "/composition.csv");
  csv.write_row({"cluster", "label", "count", "share"});
  for (int c = 0; c < k; ++c) {
    csv.write_row({format_int(c), name_of(cluster_names, c),
                   format_int(counts[static_cast<size_t>(c)]),
                   format_double(static_cast<double>(counts[static_cast<size_t>(c)]) /
                                 static_cast<double>(total))});
  }
  csv.close();

  const double bar_area = 420, label_w = 120, row_h = 30, margin = 20;
  SvgCanvas svg(label_w + bar_area + 100, margin * 2 + row_h * k + 20);
  svg.text(margin, margin, "Cluster composition", 14);
  int64_t largest = *std::max_element(counts.begin(), counts.end());
  for (int c = 0; c < k; ++c) {
    double y = margin + 15 + row_h * c;
    double w = largest > 0 ? bar_area * static_cast<double>(counts[static_cast<size_t>(c)]) /
                                 static_cast<double>(largest)
                           : 0;
    svg.text(label_w - 6, y + row_h * 0.62, name_of(cluster_names, c), 12, "end");
    svg.rect(label_w, y + 4, w, row_h - 10, cluster_color(c));
    svg.text(label_w + w + 6, y + row_h * 0.62,
             format_int(counts[static_cast<size_t>(c)]) + " (" +
                 percent(static_cast<double>(counts[static_cast<size_t>(c)]) /
                         static_cast<double>(total)) +
                 ")",
             11);
  }
  svg.save(dir + "/composition.svg");
  return {"composition.csv", "composition.svg"};
}

std::vector<std::string> write_centroid_table(const std::string& dir,
                                              const Eigen::MatrixXd& centroids,
                                              const std::vector<std::string>& cluster_names) {
  const int k = static_cast<int>(centroids.rows());

  CsvWriter csv(dir + "/centroids.csv");
  std::vector<std::string> header = {"cluster", "label"};
  for (const char* f : kFeatureNames) header.emplace_back(f);
  csv.write_row(header);
  for (int c = 0; c < k; ++c) {
    std::vector<std::string> row = {format_int(c), name_of(cluster_names, c)};
    for (int f = 0; f < 6; ++f) row.push_back(format_double(centroids(c, f)));
    csv.write_row(row);
  }
  csv.close();

  const double cell_w = 92, cell_h = 30, label_w = 120, top = 50, margin = 16;
  SvgCanvas svg(label_w + cell_w * 6 + margin * 2, top + cell_h * k + margin);
  svg.text(margin, 24, "Cluster centroids (feature space)", 14);
  for (int f = 0; f < 6; ++f) {
    svg.text(label_w + cell_w * f + cell_w / 2, top - 8, kFeatureNames[static_cast<size_t>(f)],
             10, "middle");
  }
  for (int c = 0; c < k; ++c) {
    double y = top + cell_h * c;
    svg.text(label_w - 6, y + cell_h * 0.64, name_of(cluster_names, c), 11, "end");
    for (int f = 0; f < 6; ++f) {
      double v = centroids(c, f);
      svg.rect(label_w + cell_w * f, y, cell_w - 2, cell_h - 2, heat_color(v));
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.2f", v);
      svg.text(label_w + cell_w * f + cell_w / 2, y + cell_h * 0.64, buf, 10, "middle",
               v > 0.55 ? "#222222" : "#eeeeee");
    }
  }
  svg.save(dir + "/centroids.svg");
  return {"centroids.csv", "centroids.svg"};
}

std::vector<std::string> write_space_scatter(const std::string& dir,
                                             const Eigen::MatrixXd& coords,
                                             const std::vector<int>& assignments,
                                             const std::vector<std::string>& cluster_names,
                                             int64_t max_points, uint64_t seed) {
  const Eigen::Index n = coords.rows();
  if (static_cast<Eigen::Index>(assignments.size()) != n) {
    throw Error(ErrorCode::LengthMismatch, "assignments do not align with coordinates");
  }
  std::vector<int64_t> chosen;
  if (max_points > 0 && max_points < n) {
    Rng rng(mix_seed(seed, 0x5ca7));
    chosen = rng.sample_indices(n, max_points);
    std::sort(chosen.begin(), chosen.end());
  } else {
    chosen.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) chosen[static_cast<size_t>(i)] = i;
  }

  const double plot = 520, margin = 40, legend_w = 140;
  double x_lo = coords.col(0).minCoeff(), x_hi = coords.col(0).maxCoeff();
  double y_lo = coords.col(1).minCoeff(), y_hi = coords.col(1).maxCoeff();
  if (!(x_hi > x_lo)) { x_lo -= 0.5; x_hi += 0.5; }
  if (!(y_hi > y_lo)) { y_lo -= 0.5; y_hi += 0.5; }

  SvgCanvas svg(plot + margin * 2 + legend_w, plot + margin * 2);
  svg.text(margin, margin - 14, "Educational space (PC1 x PC2)", 14);
  svg.rect(margin, margin, plot, plot, "#fafafa", "#cccccc", 1);
  for (int64_t idx : chosen) {
    double px = margin + plot * (coords(idx, 0) - x_lo) / (x_hi - x_lo);
    double py = margin + plot * (1.0 - (coords(idx, 1) - y_lo) / (y_hi - y_lo));
    svg.circle(px, py, 1.6, cluster_color(assignments[static_cast<size_t>(idx)]), 0.6);
  }
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  for (int c = 0; c < k; ++c) {
    double y = margin + 16.0 * c;
    svg.circle(margin + plot + 18, y, 5, cluster_color(c));
    svg.text(margin + plot + 30, y + 4, name_of(cluster_names, c), 11);
  }
  svg.text(margin + plot / 2, plot + margin + 26, "PC1 (academic performance)", 11, "middle");
  svg.text(margin - 24, margin + plot / 2, "PC2 (SES)", 11, "middle");
  svg.save(dir + "/space_scatter.svg");
  return {"space_scatter.svg"};
}

DensityPanelResult write_density_panels(const std::string& dir, const Eigen::MatrixXd& coords,
                                        const std::vector<std::string>& careers_by_student,
                                        const std::vector<std::string>& careers, int grid_size,
                                        double bandwidth, int threads) {
  const Eigen::Index n = coords.rows();
  if (static_cast<Eigen::Index>(careers_by_student.size()) != n) {
    throw Error(ErrorCode::LengthMismatch, "careers do not align with coordinates");
  }
  DensityPanelResult result;
  if (n < 2) {
    result.notices.emplace_back("density panels skipped: fewer than 2 projected points");
    return result;
  }

  // shared bounds: pooled bounding box padded by 3 pooled Scott bandwidths
  DensityOptions options;
  options.grid_size = grid_size;
  options.threads = threads;
  options.bandwidth_x = bandwidth;
  options.bandwidth_y = bandwidth;
  double hx = bandwidth, hy = bandwidth;
  if (bandwidth <= 0) {
    hx = scott_bandwidth(detail::population_sd<double>(coords.col(0)), n);
    hy = scott_bandwidth(detail::population_sd<double>(coords.col(1)), n);
  }
  options.has_bounds = true;
  options.x_lo = coords.col(0).minCoeff() - 3 * hx;
  options.x_hi = coords.col(0).maxCoeff() + 3 * hx;
  options.y_lo = coords.col(1).minCoeff() - 3 * hy;
  options.y_hi = coords.col(1).maxCoeff() + 3 * hy;

  // one pass to size the shared color scale
  std::vector<std::pair<std::string, DensityMap<double>>> maps;
  double peak = 0;
  for (const auto& career : careers) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (careers_by_student[static_cast<size_t>(i)] == career) rows.push_back(i);
    }
    if (rows.size() < 2) {
      result.notices.push_back("career '" + career + "': " + std::to_string(rows.size()) +
                               " point(s), panel omitted");
      continue;
    }
    Eigen::MatrixXd subset(static_cast<Eigen::Index>(rows.size()), 2);
    for (size_t i = 0; i < rows.size(); ++i) subset.row(static_cast<Eigen::Index>(i)) = coords.row(rows[i]);
    auto map = density_map<double>(subset, options);
    map.filter = career;
    peak = std::max(peak, map.grid.maxCoeff());
    maps.emplace_back(career, std::move(map));
  }

  for (const auto& [career, map] : maps) {
    const int g = grid_size;
    std::string base = "density_" + career;
    std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) {
      return std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
    });

    CsvWriter csv(dir + "/" + base + ".csv");
    csv.write_row({"row", "col", "x", "y", "density"});
    const double dx = (map.x_hi - map.x_lo) / g;
    const double dy = (map.y_hi - map.y_lo) / g;
    for (int iy = 0; iy < g; ++iy) {
      for (int ix = 0; ix < g; ++ix) {
        csv.write_row({format_int(iy), format_int(ix),
                       format_double(map.x_lo + (ix + 0.5) * dx),
                       format_double(map.y_lo + (iy + 0.5) * dy),
                       format_double(map.grid(iy, ix))});
      }
    }
    csv.close();

    const double cell = std::max(2.0, 480.0 / g), margin = 30;
    SvgCanvas svg(margin * 2 + cell * g, margin * 2 + cell * g + 10);
    svg.text(margin, margin - 10, "Density: " + career + " (n=" + format_int(map.n_points) + ")",
             13);
    for (int iy = 0; iy < g; ++iy) {
      for (int ix = 0; ix < g; ++ix) {
        double t = peak > 0 ? map.grid(iy, ix) / peak : 0;
        // grid row 0 is the lowest y; SVG y grows downward
        svg.rect(margin + cell * ix, margin + cell * (g - 1 - iy), cell, cell,
                 heat_color(std::pow(t, 0.5)));
      }
    }
    svg.save(dir + "/" + base + ".svg");
    result.artifacts.push_back(base + ".csv");
    result.artifacts.push_back(base + ".svg");
  }
  return result;
}

std::vector<std::string> write_program_shares(const std::string& dir,
                                              const std::vector<MigrationRecord>& records) {
  std::map<std::string, std::map<std::string, int64_t>> counts;  // career -> cluster -> n
  std::map<std::string, int64_t> totals;
  std::set<std::string> clusters;
  for (const auto& r : records) {
    if (r.career_area.empty()) continue;
    std::string cluster = r.cluster_label.empty() ? "unassigned" : r.cluster_label;
    counts[r.career_area][cluster] += 1;
    totals[r.career_area] += 1;
    clusters.insert(cluster);
  }

  CsvWriter csv(dir + "/program_shares.csv");
  csv.write_row({"career_area", "cluster", "count", "share"});
  for (const auto& [career, by_cluster] : counts) {
    for (const auto& [cluster, count] : by_cluster) {
      csv.write_row({career, cluster, format_int(count),
                     format_double(static_cast<double>(count) /
                                   static_cast<double>(totals[career]))});
    }
  }
  csv.close();

  const double bar_w = 420, label_w = 130, row_h = 26, margin = 20, legend_h = 20;
  const auto n_careers = static_cast<int>(counts.size());
  std::vector<std::string> cluster_list(clusters.begin(), clusters.end());
  SvgCanvas svg(label_w + bar_w + margin * 2,
                margin * 2 + row_h * n_careers + legend_h + 30);
  svg.text(margin, margin, "Cluster shares by program", 14);
  int row = 0;
  for (const auto& [career, by_cluster] : counts) {
    double y = margin + 14 + row_h * row;
    svg.text(label_w - 6, y + row_h * 0.62, career, 11, "end");
    double x = label_w;
    for (size_t c = 0; c < cluster_list.size(); ++c) {
      auto it = by_cluster.find(cluster_list[c]);
      if (it == by_cluster.end()) continue;
      double w = bar_w * static_cast<double>(it->second) /
                 static_cast<double>(totals[career]);
      svg.rect(x, y + 3, w, row_h - 8, cluster_color(static_cast<int>(c)));
      x += w;
    }
    ++row;
  }
  double ly = margin + 20 + row_h * n_careers;
  double lx = label_w;
  for (size_t c = 0; c < cluster_list.size(); ++c) {
    svg.rect(lx, ly, 10, 10, cluster_color(static_cast<int>(c)));
    svg.text(lx + 14, ly + 9, cluster_list[c], 10);
    lx += 14.0 + 7.0 * static_cast<double>(cluster_list[c].size()) + 18.0;
  }
  svg.save(dir + "/program_shares.svg");
  return {"program_shares.csv", "program_shares.svg"};
}

std::vector<std::string> write_migration_report(const std::string& dir, const RateTable& rates,
                                                const RateTable& rates_by_year,
                                                const MigrationMatrix& matrix) {
  auto write_rates = [&](const std::string& name, const RateTable& table) {
    CsvWriter csv(dir + "/" + name);
    csv.write_row({"cluster", "career_area", "home_region", "enroll_year", "numerator",
                   "denominator", "rate", "suppressed"});
    for (const auto& row : table.rows) {
      std::vector<std::string> cells = {row.cluster_label, row.career_area,
                                        row.home_region >= 0 ? format_int(row.home_region) : "",
                                        row.enroll_year >= 0 ? format_int(row.enroll_year) : ""};
      if (row.suppressed) {
        cells.insert(cells.end(), {"", "", "", "1"});
      } else {
        cells.insert(cells.end(), {format_int(row.numerator), format_int(row.denominator),
                                   format_double(row.rate), "0"});
      }
      csv.write_row(cells);
    }
    csv.close();
  };
  write_rates("migration_rates.csv", rates);
  write_rates("migration_rates_by_year.csv", rates_by_year);

  const int m = static_cast<int>(matrix.regions.size());
  CsvWriter csv(dir + "/migration_matrix.csv");
  std::vector<std::string> header = {"home_region", "out_rate"};
  for (int j = 0; j < m; ++j) header.push_back("to_" + format_int(matrix.regions[static_cast<size_t>(j)]));
  csv.write_row(header);
  for (int i = 0; i < m; ++i) {
    std::vector<std::string> row = {format_int(matrix.regions[static_cast<size_t>(i)]),
                                    format_double(matrix.out_rate[static_cast<size_t>(i)])};
    for (int j = 0; j < m; ++j) row.push_back(format_int(matrix.counts(i, j)));
    csv.write_row(row);
  }
  csv.close();

  const double cell = 30, label = 90, margin = 26;
  SvgCanvas svg(margin * 2 + label + cell * m, margin * 2 + label + cell * m);
  svg.text(margin, margin - 8, "Migration flows (rows ordered by out-rate)", 13);
  for (int i = 0; i < m; ++i) {
    int64_t row_total = matrix.counts.row(i).sum();
    svg.text(margin + label - 6, margin + label + cell * i + cell * 0.64,
             "R" + format_int(matrix.regions[static_cast<size_t>(i)]) + " " +
                 percent(matrix.out_rate[static_cast<size_t>(i)]),
             10, "end");
    svg.text(margin + label + cell * i + cell / 2, margin + label - 6,
             "R" + format_int(matrix.regions[static_cast<size_t>(i)]), 10, "middle");
    for (int j = 0; j < m; ++j) {
      double share = row_total > 0 ? static_cast<double>(matrix.counts(i, j)) /
                                         static_cast<double>(row_total)
                                   : 0;
      svg.rect(margin + label + cell * j, margin + label + cell * i, cell - 1, cell - 1,
               heat_color(std::pow(share, 0.5)));
    }
  }
  svg.save(dir + "/migration_heatmap.svg");
  return {"migration_rates.csv", "migration_rates_by_year.csv", "migration_matrix.csv",
          "migration_heatmap.svg"};
}

}  // namespace eduspace
