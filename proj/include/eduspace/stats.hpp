#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "eduspace/error.hpp"

namespace eduspace {

// Value a zero-range min-max group maps to: the midpoint, so an uninformative
// column does not assert an extreme.
inline constexpr double kZeroRangeValue = 0.5;

template <typename Scalar>
Scalar median(std::vector<Scalar> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySchool, "median of empty list");
  const size_t n = values.size();
  const size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
  Scalar hi = values[mid];
  if (n % 2 == 1) return hi;
  Scalar lo = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return (lo + hi) / Scalar(2);
}

/// Mid-rank empirical CDF: percentile(v) = (#strictly below + 0.5 #equal) / N.
/// Tie-stable and symmetric; all outputs in (0, 1).
template <typename Scalar>
std::vector<Scalar> midrank_percentiles(const std::vector<Scalar>& values) {
  const size_t n = values.size();
  std::vector<Scalar> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<Scalar> out(n);
  for (size_t i = 0; i < n; ++i) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), values[i]);
    auto hi = std::upper_bound(lo, sorted.end(), values[i]);
    const auto below = static_cast<Scalar>(lo - sorted.begin());
    const auto equal = static_cast<Scalar>(hi - lo);
    out[i] = (below + Scalar(0.5) * equal) / static_cast<Scalar>(n);
  }
  return out;
}

/// Competition ranking, descending: tied values share the minimum rank; the
/// next distinct value's rank counts all strictly better entries.
template <typename Scalar>
std::vector<int> competition_ranks_desc(const std::vector<Scalar>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] > values[b]; });
  std::vector<int> ranks(n, 0);
  int current_rank = 1;
  for (size_t pos = 0; pos < n; ++pos) {
    if (pos > 0 && values[order[pos]] != values[order[pos - 1]]) {
      current_rank = static_cast<int>(pos) + 1;
    }
    ranks[order[pos]] = current_rank;
  }
  return ranks;
}

template <typename Scalar>
std::vector<Scalar> minmax_scale(const std::vector<Scalar>& values) {
  if (values.empty()) return {};
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const Scalar lo = *lo_it, hi = *hi_it;
  std::vector<Scalar> out(values.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), Scalar(kZeroRangeValue));
    return out;
  }
  const Scalar range = hi - lo;
  for (size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / range;
  return out;
}

/// Min-max per year group; groups never interact, so perturbing one year's
/// data leaves the others bit-identical.
template <typename Scalar>
std::vector<Scalar> minmax_scale_by_year(const std::vector<std::pair<int, Scalar>>& values) {
  std::map<int, std::pair<Scalar, Scalar>> range;  // year -> (min, max)
  for (const auto& [year, v] : values) {
    auto it = range.find(year);
    if (it == range.end()) {
      range.emplace(year, std::make_pair(v, v));
    } else {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  std::vector<Scalar> out;
  out.reserve(values.size());
  for (const auto& [year, v] : values) {
    const auto& [lo, hi] = range.at(year);
    out.push_back(lo == hi ? Scalar(kZeroRangeValue) : (v - lo) / (hi - lo));
  }
  return out;
}

}  // namespace eduspace
