#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "eduspace/error.hpp"
#include "eduspace/parallel.hpp"
#include "eduspace/rng.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

struct KMeansOptions {
  int k = 7;
  uint64_t seed = 0;
  int restarts = 10;
  double tol = 1e-6;      // max centroid shift (L2) for convergence
  int max_iter = 300;
  int threads = 1;
  bool keep_traces = false;  // retain the per-iteration objective of every restart
};

template <typename Scalar>
struct KMeansModel {
  int k = 0;
  MatrixX<Scalar> centroids;       // k x d
  std::vector<int> assignments;    // n, values in [0, k)
  Scalar objective = 0;
  int n_iterations = 0;
  uint64_t seed = 0;
  int restarts = 0;
  // objective after each assignment step; traces[r] belongs to restart r and
  // is only populated when keep_traces is set (best restart otherwise)
  std::vector<std::vector<Scalar>> traces;
  int best_restart = 0;
};

/// J = sum over points of the squared distance to the assigned centroid.
template <typename Scalar>
Scalar kmeans_objective(const MatrixX<Scalar>& points, const MatrixX<Scalar>& centroids,
                        const std::vector<int>& assignments) {
  if (points.cols() != centroids.cols() ||
      static_cast<Eigen::Index>(assignments.size()) != points.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "objective inputs disagree");
  }
  Scalar total = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int c = assignments[static_cast<size_t>(i)];
    if (c < 0 || c >= static_cast<int>(centroids.rows())) {
      throw Error(ErrorCode::ShapeMismatch, "assignment index out of range");
    }
    total += (points.row(i) - centroids.row(c)).squaredNorm();
  }
  return total;
}

namespace detail {

constexpr int64_t kAssignBlock = 4096;

// nearest centroid per point; per-block partial sums keep the reduction order
// fixed for any worker count
template <typename Scalar>
void assign_points(const MatrixX<Scalar>& points, const MatrixX<Scalar>& centroids,
                   std::vector<int>& assignments, int threads, Scalar* objective_out) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  const int64_t n_blocks = (n + kAssignBlock - 1) / kAssignBlock;
  std::vector<Scalar> block_sums(static_cast<size_t>(n_blocks), Scalar(0));

  for_each_block(n, kAssignBlock, threads, [&](int64_t block, int64_t begin, int64_t end) {
    Scalar sum = 0;
    for (int64_t i = begin; i < end; ++i) {
      Scalar best = std::numeric_limits<Scalar>::max();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        Scalar d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignments[static_cast<size_t>(i)] = best_c;
      sum += best;
    }
    block_sums[static_cast<size_t>(block)] = sum;
  });

  if (objective_out) {
    Scalar total = 0;
    for (Scalar s : block_sums) total += s;
    *objective_out = total;
  }
}

template <typename Scalar>
MatrixX<Scalar> kmeanspp_init(const MatrixX<Scalar>& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  MatrixX<Scalar> centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<uint64_t>(n))));
  VectorX<Scalar> dist2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
  }
  for (int c = 1; c < k; ++c) {
    Scalar total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0) {
      Scalar u = static_cast<Scalar>(rng.uniform()) * total;
      Scalar acc = 0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (u < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<uint64_t>(n)));
    }
    centroids.row(c) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < dist2(i)) dist2(i) = d;
    }
  }
  return centroids;
}

// centroid update via fixed-order block partial sums; empty clusters are
// re-seeded to the farthest points so k never degenerates
template <typename Scalar>
void update_centroids(const MatrixX<Scalar>& points, const std::vector<int>& assignments,
                      MatrixX<Scalar>& centroids, int threads) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  const Eigen::Index d = points.cols();
  const int64_t n_blocks = (n + kAssignBlock - 1) / kAssignBlock;

  std::vector<MatrixX<Scalar>> sums(static_cast<size_t>(n_blocks));
  std::vector<std::vector<int64_t>> counts(static_cast<size_t>(n_blocks));
  for_each_block(n, kAssignBlock, threads, [&](int64_t block, int64_t begin, int64_t end) {
    MatrixX<Scalar> s = MatrixX<Scalar>::Zero(k, d);
    std::vector<int64_t> c(static_cast<size_t>(k), 0);
    for (int64_t i = begin; i < end; ++i) {
      int a = assignments[static_cast<size_t>(i)];
      s.row(a) += points.row(i);
      ++c[static_cast<size_t>(a)];
    }
    sums[static_cast<size_t>(block)] = std::move(s);
    counts[static_cast<size_t>(block)] = std::move(c);
  });

  MatrixX<Scalar> sum = MatrixX<Scalar>::Zero(k, d);
  std::vector<int64_t> count(static_cast<size_t>(k), 0);
  for (int64_t b = 0; b < n_blocks; ++b) {
    sum += sums[static_cast<size_t>(b)];
    for (int c = 0; c < k; ++c) count[static_cast<size_t>(c)] += counts[static_cast<size_t>(b)][static_cast<size_t>(c)];
  }

  std::vector<int> empties;
  for (int c = 0; c < k; ++c) {
    if (count[static_cast<size_t>(c)] > 0) {
      centroids.row(c) = sum.row(c) / static_cast<Scalar>(count[static_cast<size_t>(c)]);
    } else {
      empties.push_back(c);
    }
  }
  if (empties.empty()) return;

  // farthest points from their assigned centroids, each taken once
  std::vector<Scalar> dist(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    dist[static_cast<size_t>(i)] =
        (points.row(i) - centroids.row(assignments[static_cast<size_t>(i)])).squaredNorm();
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return dist[static_cast<size_t>(a)] > dist[static_cast<size_t>(b)];
  });
  for (size_t e = 0; e < empties.size() && e < order.size(); ++e) {
    centroids.row(empties[e]) = points.row(order[e]);
  }
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by objective.
/// Deterministic in (points, options); output does not depend on the thread
/// count. Throws Error{TooFewPoints} when n < k and Error{NonFinite} on bad
/// input.
template <typename Scalar>
KMeansModel<Scalar> kmeans(const MatrixX<Scalar>& points, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (options.k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  if (n < options.k) {
    throw Error(ErrorCode::TooFewPoints,
                "n=" + std::to_string(n) + " < k=" + std::to_string(options.k));
  }
  if (!points.allFinite()) throw Error(ErrorCode::NonFinite, "points must be finite");

  KMeansModel<Scalar> best;
  best.k = options.k;
  best.seed = options.seed;
  best.restarts = options.restarts;
  best.objective = std::numeric_limits<Scalar>::max();

  std::vector<std::vector<Scalar>> all_traces;

  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng = Rng::stream(options.seed, static_cast<uint64_t>(r));
    MatrixX<Scalar> centroids = detail::kmeanspp_init(points, options.k, rng);
    std::vector<int> assignments(static_cast<size_t>(n), 0);
    std::vector<Scalar> trace;
    Scalar objective = std::numeric_limits<Scalar>::max();
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
      Scalar j = 0;
      detail::assign_points(points, centroids, assignments, options.threads, &j);
      // Lloyd guarantee, allowing only FP rounding slack
      if (!trace.empty() && j > trace.back() * (Scalar(1) + Scalar(1e-12))) {
        throw Error(ErrorCode::NonFinite, "objective increased within a restart");
      }
      trace.push_back(j);
      objective = j;
      MatrixX<Scalar> previous = centroids;
      detail::update_centroids(points, assignments, centroids, options.threads);
      Scalar shift = 0;
      for (int c = 0; c < options.k; ++c) {
        shift = std::max(shift, Scalar((centroids.row(c) - previous.row(c)).norm()));
      }
      if (shift < static_cast<Scalar>(options.tol)) {
        centroids = previous;  // assignments/objective correspond to `previous`
        break;
      }
    }
    if (options.keep_traces) all_traces.push_back(trace);
    if (objective < best.objective) {
      best.centroids = centroids;
      best.assignments = assignments;
      best.objective = objective;
      best.n_iterations = static_cast<int>(trace.size());
      best.best_restart = r;
      if (!options.keep_traces) {
        best.traces.clear();
        best.traces.push_back(trace);
      }
    }
  }
  if (options.keep_traces) best.traces = std::move(all_traces);
  return best;
}

/// Mean silhouette (b - a) / max(a, b). Exact when sample_size >= n or
/// sample_size <= 0; otherwise computed on a seeded subsample. Points whose
/// cluster is a singleton within the evaluated set score 0.
template <typename Scalar>
Scalar silhouette(const MatrixX<Scalar>& points, const std::vector<int>& assignments,
                  int64_t sample_size = 0, uint64_t seed = 0) {
  const Eigen::Index n = points.rows();
  if (static_cast<Eigen::Index>(assignments.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch, "assignments length");
  }
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  if (k < 2) throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");

  std::vector<Eigen::Index> idx;
  if (sample_size > 0 && sample_size < n) {
    Rng rng(seed);
    auto chosen = rng.sample_indices(n, sample_size);
    std::sort(chosen.begin(), chosen.end());
    idx.assign(chosen.begin(), chosen.end());
  } else {
    idx.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  }
  const size_t m = idx.size();

  std::vector<int64_t> cluster_count(static_cast<size_t>(k), 0);
  for (size_t i = 0; i < m; ++i) ++cluster_count[static_cast<size_t>(assignments[static_cast<size_t>(idx[i])])];

  Scalar total = 0;
  int64_t scored = 0;
  std::vector<Scalar> sum_by_cluster(static_cast<size_t>(k));
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Index pi = idx[i];
    const int ci = assignments[static_cast<size_t>(pi)];
    std::fill(sum_by_cluster.begin(), sum_by_cluster.end(), Scalar(0));
    for (size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const Eigen::Index pj = idx[j];
      sum_by_cluster[static_cast<size_t>(assignments[static_cast<size_t>(pj)])] +=
          (points.row(pi) - points.row(pj)).norm();
    }
    if (cluster_count[static_cast<size_t>(ci)] <= 1) {
      ++scored;  // singleton scores 0
      continue;
    }
    Scalar a = sum_by_cluster[static_cast<size_t>(ci)] /
               static_cast<Scalar>(cluster_count[static_cast<size_t>(ci)] - 1);
    Scalar b = std::numeric_limits<Scalar>::max();
    for (int c = 0; c < k; ++c) {
      if (c == ci || cluster_count[static_cast<size_t>(c)] == 0) continue;
      b = std::min(b, sum_by_cluster[static_cast<size_t>(c)] /
                          static_cast<Scalar>(cluster_count[static_cast<size_t>(c)]));
    }
    if (b == std::numeric_limits<Scalar>::max()) {
      ++scored;  // no other cluster present in the sample
      continue;
    }
    Scalar denom = std::max(a, b);
    total += denom > 0 ? (b - a) / denom : Scalar(0);
    ++scored;
  }
  return scored > 0 ? total / static_cast<Scalar>(scored) : Scalar(0);
}

struct ValidationCurve {
  std::vector<int> k_values;
  std::vector<double> objective_per_k;
  std::vector<double> silhouette_per_k;
  int knee_k = -1;  // maximum second difference of the objective; -1 when undefined
};

/// Runs kmeans for every k in [k_lo, k_hi] under a shared restart policy and
/// reports both selection diagnostics.
template <typename Scalar>
ValidationCurve scan_k(const MatrixX<Scalar>& points, int k_lo, int k_hi,
                       const KMeansOptions& base, int64_t silhouette_sample = 10000) {
  if (k_lo < 2 || k_hi < k_lo || static_cast<Eigen::Index>(k_hi) > points.rows()) {
    throw Error(ErrorCode::InvalidConfig, "scan range must lie within [2, n]");
  }
  ValidationCurve curve;
  for (int k = k_lo; k <= k_hi; ++k) {
    KMeansOptions opt = base;
    opt.k = k;
    opt.seed = mix_seed(base.seed, static_cast<uint64_t>(k));
    auto model = kmeans(points, opt);
    curve.k_values.push_back(k);
    curve.objective_per_k.push_back(static_cast<double>(model.objective));
    curve.silhouette_per_k.push_back(static_cast<double>(
        silhouette(points, model.assignments, silhouette_sample, mix_seed(opt.seed, 0x51))));
  }
  if (curve.k_values.size() >= 3) {
    double best = -std::numeric_limits<double>::max();
    for (size_t i = 1; i + 1 < curve.k_values.size(); ++i) {
      double second_diff = curve.objective_per_k[i - 1] - 2.0 * curve.objective_per_k[i] +
                           curve.objective_per_k[i + 1];
      if (second_diff > best) {
        best = second_diff;
        curve.knee_k = curve.k_values[i];
      }
    }
  }
  return curve;
}

}  // namespace eduspace
