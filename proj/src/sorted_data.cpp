#include "calband/sorted_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace calband {

std::size_t SortedBinaryData::find_group(double x) const {
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
  if (it == knots_.end() || *it != x) return knots_.size();
  return static_cast<std::size_t>(it - knots_.begin());
}

SortedBinaryData build_sorted_data(std::span<const Observation> pairs) {
  if (pairs.empty()) throw std::invalid_argument("build_sorted_data: no observations");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!std::isfinite(pairs[i].x)) {
      throw std::invalid_argument("build_sorted_data: non-finite covariate at index " + std::to_string(i));
    }
    if (pairs[i].y != 0 && pairs[i].y != 1) {
      throw std::invalid_argument("build_sorted_data: outcome at index " + std::to_string(i) + " is not 0 or 1");
    }
  }

  std::vector<Observation> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Observation& a, const Observation& b) { return a.x < b.x; });

  SortedBinaryData data;
  const std::size_t n = sorted.size();
  data.x_.reserve(n);
  data.y_.reserve(n);
  data.prefix_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    // -0.0 and 0.0 compare equal; store one representation per group.
    data.x_.push_back(sorted[i].x == 0.0 ? 0.0 : sorted[i].x);
    data.y_.push_back(static_cast<std::uint8_t>(sorted[i].y));
    data.prefix_[i + 1] = data.prefix_[i] + sorted[i].y;
    if (i == 0 || data.x_[i] != data.x_[i - 1]) {
      data.knots_.push_back(data.x_[i]);
      data.offsets_.push_back(i);
    }
  }
  data.offsets_.push_back(n);
  return data;
}

SortedBinaryData build_sorted_data(std::span<const double> x, std::span<const int> y) {
  if (x.size() != y.size()) throw std::invalid_argument("build_sorted_data: x and y differ in length");
  std::vector<Observation> pairs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pairs[i] = {x[i], y[i]};
  return build_sorted_data(pairs);
}

}  // namespace calband
