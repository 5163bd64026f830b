#include "calband/bands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calband {

namespace {

double grid_point(std::int64_t r, std::int64_t grid) { return static_cast<double>(r) / static_cast<double>(grid); }

// Largest r with r/K <= x.
std::int64_t floor_on_grid(double x, std::int64_t grid) {
  auto r = static_cast<std::int64_t>(std::floor(x * static_cast<double>(grid)));
  while (grid_point(r + 1, grid) <= x) ++r;
  while (grid_point(r, grid) > x) --r;
  return r;
}

// Smallest s with s/K >= x.
std::int64_t ceil_on_grid(double x, std::int64_t grid) {
  auto s = static_cast<std::int64_t>(std::ceil(x * static_cast<double>(grid)));
  while (grid_point(s - 1, grid) >= x) --s;
  while (grid_point(s, grid) < x) ++s;
  return s;
}

}  // namespace

IndexPairFamily::IndexPairFamily(Kind kind, std::int64_t grid, std::size_t groups, std::vector<std::size_t> starts,
                                 std::vector<std::size_t> ends)
    : kind_(kind), grid_(grid), group_count_(groups), left_starts_(std::move(starts)), right_ends_(std::move(ends)) {
  // For each start, count ends at or after it.
  std::size_t e = 0;
  for (const std::size_t j : left_starts_) {
    while (e < right_ends_.size() && right_ends_[e] < j) ++e;
    size_ += right_ends_.size() - e;
  }
}

IndexPairFamily IndexPairFamily::full(const SortedBinaryData& data) {
  const std::size_t groups = data.group_count();
  std::vector<std::size_t> all(groups);
  for (std::size_t g = 0; g < groups; ++g) all[g] = g;
  return IndexPairFamily(Kind::full, 0, groups, all, all);
}

IndexPairFamily IndexPairFamily::rounded(const SortedBinaryData& data, std::int64_t grid) {
  if (grid < 1) throw std::invalid_argument("rounded index family: K must be >= 1");
  const auto knots = data.knots();
  const std::size_t groups = knots.size();
  if (std::fabs(knots.front()) * static_cast<double>(grid) > 9e15 ||
      std::fabs(knots.back()) * static_cast<double>(grid) > 9e15) {
    throw std::invalid_argument("rounded index family: covariates too large for the grid");
  }
  std::vector<std::size_t> starts;
  std::vector<std::size_t> ends;
  for (std::size_t g = 0; g < groups; ++g) {
    // Group g starts a window iff some grid point r/K satisfies
    // x_{g-1} < r/K <= x_g; the best candidate is the largest r/K <= x_g.
    if (g == 0 || grid_point(floor_on_grid(knots[g], grid), grid) > knots[g - 1]) starts.push_back(g);
    // Group g ends a window iff some s/K satisfies x_g <= s/K < x_{g+1}.
    if (g + 1 == groups || grid_point(ceil_on_grid(knots[g], grid), grid) < knots[g + 1]) ends.push_back(g);
  }
  return IndexPairFamily(Kind::rounded, grid, groups, std::move(starts), std::move(ends));
}

bool IndexPairFamily::contains(std::size_t j, std::size_t k) const {
  return j <= k && std::binary_search(left_starts_.begin(), left_starts_.end(), j) &&
         std::binary_search(right_ends_.begin(), right_ends_.end(), k);
}

std::vector<IndexPair> IndexPairFamily::pairs() const {
  std::vector<IndexPair> out;
  out.reserve(size_);
  for (const std::size_t j : left_starts_) {
    for (auto it = std::lower_bound(right_ends_.begin(), right_ends_.end(), j); it != right_ends_.end(); ++it) {
      out.push_back({j, *it});
    }
  }
  return out;
}

}  // namespace calband
