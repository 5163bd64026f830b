#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "calband/sorted_data.hpp"

namespace calband {

/// A maximal run of tie groups sharing one fitted value.
struct IsotonicBlock {
  std::size_t first_group = 0;
  std::size_t last_group = 0;  // inclusive
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double level = 0.0;  // successes / trials
};

/// Isotonic least-squares fit of binary outcomes, stored per distinct
/// covariate. Block levels are strictly increasing.
class IsotonicFit {
 public:
  IsotonicFit() = default;
  IsotonicFit(std::vector<IsotonicBlock> blocks, std::vector<double> knots);

  std::span<const IsotonicBlock> blocks() const { return blocks_; }
  std::span<const double> knots() const { return knots_; }
  std::size_t group_count() const { return group_levels_.size(); }

  /// Fitted value at tie group g.
  double level_at_group(std::size_t g) const { return group_levels_[g]; }
  std::span<const double> group_levels() const { return group_levels_; }

  /// Number of distinct fitted values.
  std::size_t level_count() const { return blocks_.size(); }

 private:
  std::vector<IsotonicBlock> blocks_;
  std::vector<double> knots_;
  std::vector<double> group_levels_;
};

/// Stack-based pool-adjacent-violators on tie-group sums. O(N).
IsotonicFit pava(const SortedBinaryData& data);

/// Weighted isotonic regression of arbitrary real values; returns one fitted
/// value per input. Weights must be positive.
std::vector<double> isotonic_regression(std::span<const double> values, std::span<const double> weights);

struct ConstancyEndpoints {
  std::vector<std::size_t> left_starts;  // first group of each block
  std::vector<std::size_t> right_ends;   // last group of each block
};

ConstancyEndpoints constancy_endpoints(const IsotonicFit& fit);

/// Cumulative fitted values over tie groups: entry g is the sum of the fit
/// over all observations in groups [0, g). Length N + 1.
std::vector<double> isotonic_prefix_sums(const SortedBinaryData& data, const IsotonicFit& fit);

}  // namespace calband
