#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/error.hpp"
#include "eduspace/parallel.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

/// Scott's rule for a 2-D kernel: h = sigma * n^(-1/6).
template <typename Scalar>
Scalar scott_bandwidth(Scalar sd, int64_t n) {
  if (n < 1) throw Error(ErrorCode::TooFewPoints, "bandwidth needs n >= 1");
  return sd * static_cast<Scalar>(std::pow(static_cast<double>(n), -1.0 / 6.0));
}

struct DensityOptions {
  int grid_size = 200;
  double bandwidth_x = 0;  // <= 0 selects Scott's rule on that axis
  double bandwidth_y = 0;
  bool has_bounds = false;  // explicit bounds keep panels comparable across filters
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  int threads = 1;
};

template <typename Scalar>
struct DensityMap {
  std::string filter;          // caller-supplied description of the point subset
  MatrixX<Scalar> grid;        // grid(iy, ix), non-negative, sums to 1
  Scalar x_lo = 0, x_hi = 0;   // outer edges of the cell lattice
  Scalar y_lo = 0, y_hi = 0;
  Scalar bandwidth_x = 0, bandwidth_y = 0;
  int64_t n_points = 0;
};

namespace detail {

template <typename Scalar>
Scalar population_sd(const VectorX<Scalar>& v) {
  Scalar mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<Scalar>(v.size()));
}

// separable Gaussian blur along axis 0 of `grid`, truncated at 5 bandwidths;
// transpose-call for the other axis
template <typename Scalar>
void blur_columns(MatrixX<Scalar>& grid, Scalar h, Scalar cell, int threads) {
  if (h <= Scalar(0)) return;
  const int g = static_cast<int>(grid.rows());
  int radius = static_cast<int>(std::ceil(5.0 * static_cast<double>(h / cell)));
  radius = std::min(radius, g - 1);
  if (radius < 1) return;
  VectorX<Scalar> kernel(2 * radius + 1);
  for (int t = -radius; t <= radius; ++t) {
    Scalar z = static_cast<Scalar>(t) * cell / h;
    kernel(t + radius) = std::exp(Scalar(-0.5) * z * z);
  }
  kernel /= kernel.sum();

  MatrixX<Scalar> source = grid;
  for_each_block(g, 32, threads, [&](int64_t, int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      int lo = std::max<int>(0, static_cast<int>(i) - radius);
      int hi = std::min<int>(g - 1, static_cast<int>(i) + radius);
      grid.row(i) = kernel.segment(lo - static_cast<int>(i) + radius, hi - lo + 1).transpose() *
                    source.middleRows(lo, hi - lo + 1);
    }
  });
}

}  // namespace detail

/// Gaussian kernel density of 2-D coordinates on a grid_size^2 lattice:
/// bilinear binning onto cell centers followed by a separable truncated
/// Gaussian blur, then normalization to unit mass. Bounds default to the
/// bounding box padded by 3 bandwidths; pass explicit bounds to share axes
/// across several maps. A non-positive bandwidth resolved by Scott's rule to
/// zero (degenerate axis) skips smoothing, leaving the binned mass in the
/// cells nearest the points. Throws Error{TooFewPoints} for n < 2.
template <typename Scalar>
DensityMap<Scalar> density_map(const MatrixX<Scalar>& coords, const DensityOptions& options) {
  const Eigen::Index n = coords.rows();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "density map needs at least 2 points");
  if (coords.cols() != 2) throw Error(ErrorCode::ShapeMismatch, "coords must be n x 2");
  if (options.grid_size < 2) throw Error(ErrorCode::InvalidConfig, "grid_size must be >= 2");
  const int g = options.grid_size;

  DensityMap<Scalar> map;
  map.n_points = n;
  map.bandwidth_x = options.bandwidth_x > 0
                        ? static_cast<Scalar>(options.bandwidth_x)
                        : scott_bandwidth(detail::population_sd<Scalar>(coords.col(0)), n);
  map.bandwidth_y = options.bandwidth_y > 0
                        ? static_cast<Scalar>(options.bandwidth_y)
                        : scott_bandwidth(detail::population_sd<Scalar>(coords.col(1)), n);

  if (options.has_bounds) {
    map.x_lo = static_cast<Scalar>(options.x_lo);
    map.x_hi = static_cast<Scalar>(options.x_hi);
    map.y_lo = static_cast<Scalar>(options.y_lo);
    map.y_hi = static_cast<Scalar>(options.y_hi);
  } else {
    map.x_lo = coords.col(0).minCoeff() - 3 * map.bandwidth_x;
    map.x_hi = coords.col(0).maxCoeff() + 3 * map.bandwidth_x;
    map.y_lo = coords.col(1).minCoeff() - 3 * map.bandwidth_y;
    map.y_hi = coords.col(1).maxCoeff() + 3 * map.bandwidth_y;
  }
  // a point mass still needs a lattice with extent
  if (!(map.x_hi > map.x_lo)) { map.x_lo -= Scalar(0.5); map.x_hi += Scalar(0.5); }
  if (!(map.y_hi > map.y_lo)) { map.y_lo -= Scalar(0.5); map.y_hi += Scalar(0.5); }

  const Scalar dx = (map.x_hi - map.x_lo) / static_cast<Scalar>(g);
  const Scalar dy = (map.y_hi - map.y_lo) / static_cast<Scalar>(g);

  map.grid = MatrixX<Scalar>::Zero(g, g);
  for (Eigen::Index i = 0; i < n; ++i) {
    // fractional index of the point among cell centers, clamped to the lattice
    Scalar px = (coords(i, 0) - map.x_lo) / dx - Scalar(0.5);
    Scalar py = (coords(i, 1) - map.y_lo) / dy - Scalar(0.5);
    px = std::clamp(px, Scalar(0), static_cast<Scalar>(g - 1));
    py = std::clamp(py, Scalar(0), static_cast<Scalar>(g - 1));
    int ix = std::min(static_cast<int>(px), g - 2);
    int iy = std::min(static_cast<int>(py), g - 2);
    Scalar wx = px - static_cast<Scalar>(ix);
    Scalar wy = py - static_cast<Scalar>(iy);
    map.grid(iy, ix) += (1 - wy) * (1 - wx);
    map.grid(iy, ix + 1) += (1 - wy) * wx;
    map.grid(iy + 1, ix) += wy * (1 - wx);
    map.grid(iy + 1, ix + 1) += wy * wx;
  }

  detail::blur_columns(map.grid, map.bandwidth_y, dy, options.threads);
  MatrixX<Scalar> transposed = map.grid.transpose();
  detail::blur_columns(transposed, map.bandwidth_x, dx, options.threads);
  map.grid = transposed.transpose();

  map.grid /= map.grid.sum();
  return map;
}

}  // namespace eduspace
