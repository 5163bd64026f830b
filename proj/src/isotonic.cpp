#include "calband/isotonic.hpp"

#include <stdexcept>

namespace calband {

namespace {

// Pooled run of inputs [first, last] with total sum and weight.
template <typename Sum, typename Weight>
struct Pool {
  std::size_t first;
  std::size_t last;
  Sum sum;
  Weight weight;
};

// True if the mean of `left` is >= the mean of `right`, i.e. the two pools
// violate strict increase and must be merged.
inline bool violates(const Pool<std::int64_t, std::int64_t>& left, const Pool<std::int64_t, std::int64_t>& right) {
  return left.sum * right.weight >= right.sum * left.weight;
}

inline bool violates(const Pool<double, double>& left, const Pool<double, double>& right) {
  return left.sum / left.weight >= right.sum / right.weight;
}

template <typename Sum, typename Weight>
std::vector<Pool<Sum, Weight>> pool_adjacent_violators(std::span<const Sum> sums, std::span<const Weight> weights) {
  std::vector<Pool<Sum, Weight>> stack;
  stack.reserve(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    Pool<Sum, Weight> current{i, i, sums[i], weights[i]};
    while (!stack.empty() && violates(stack.back(), current)) {
      const auto& top = stack.back();
      current = {top.first, current.last, top.sum + current.sum, top.weight + current.weight};
      stack.pop_back();
    }
    stack.push_back(current);
  }
  return stack;
}

}  // namespace

IsotonicFit::IsotonicFit(std::vector<IsotonicBlock> blocks, std::vector<double> knots)
    : blocks_(std::move(blocks)), knots_(std::move(knots)) {
  group_levels_.assign(knots_.size(), 0.0);
  for (const auto& block : blocks_) {
    if (block.last_group >= knots_.size() || block.first_group > block.last_group) {
      throw std::invalid_argument("IsotonicFit: block outside the knot range");
    }
    for (std::size_t g = block.first_group; g <= block.last_group; ++g) group_levels_[g] = block.level;
  }
}

IsotonicFit pava(const SortedBinaryData& data) {
  const std::size_t groups = data.group_count();
  std::vector<std::int64_t> sums(groups);
  std::vector<std::int64_t> sizes(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    sums[g] = data.successes(g, g);
    sizes[g] = data.group_size(g);
  }
  const auto pools = pool_adjacent_violators<std::int64_t, std::int64_t>(sums, sizes);

  std::vector<IsotonicBlock> blocks;
  blocks.reserve(pools.size());
  for (const auto& pool : pools) {
    blocks.push_back({pool.first, pool.last, pool.sum, pool.weight,
                      static_cast<double>(pool.sum) / static_cast<double>(pool.weight)});
  }
  const auto knots = data.knots();
  return IsotonicFit(std::move(blocks), std::vector<double>(knots.begin(), knots.end()));
}

std::vector<double> isotonic_regression(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("isotonic_regression: size mismatch");
  std::vector<double> sums(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("isotonic_regression: weights must be positive");
    sums[i] = values[i] * weights[i];
  }
  const auto pools = pool_adjacent_violators<double, double>(sums, weights);
  std::vector<double> fitted(values.size());
  for (const auto& pool : pools) {
    const double level = pool.sum / pool.weight;
    for (std::size_t i = pool.first; i <= pool.last; ++i) fitted[i] = level;
  }
  return fitted;
}

ConstancyEndpoints constancy_endpoints(const IsotonicFit& fit) {
  ConstancyEndpoints ends;
  ends.left_starts.reserve(fit.level_count());
  ends.right_ends.reserve(fit.level_count());
  for (const auto& block : fit.blocks()) {
    ends.left_starts.push_back(block.first_group);
    ends.right_ends.push_back(block.last_group);
  }
  return ends;
}

std::vector<double> isotonic_prefix_sums(const SortedBinaryData& data, const IsotonicFit& fit) {
  if (fit.group_count() != data.group_count()) throw std::invalid_argument("isotonic_prefix_sums: size mismatch");
  std::vector<double> sums(data.group_count() + 1, 0.0);
  for (std::size_t g = 0; g < data.group_count(); ++g) {
    sums[g + 1] = sums[g] + static_cast<double>(data.group_size(g)) * fit.level_at_group(g);
  }
  return sums;
}

}  // namespace calband
