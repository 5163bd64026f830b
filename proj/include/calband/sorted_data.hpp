#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace calband {

/// One (prediction, outcome) pair with outcome in {0, 1}.
struct Observation {
  double x = 0.0;
  int y = 0;
};

/// Binary outcomes sorted by covariate, grouped by distinct covariate value.
///
/// Indices are 0-based. Observation indices run over [0, n); tie groups over
/// [0, N) where N is the number of distinct covariate values. Group g covers
/// the half-open observation range [group_begin(g), group_end(g)). The order
/// of observations inside a tie group is unspecified; everything downstream
/// depends only on group sums.
class SortedBinaryData {
 public:
  std::size_t size() const { return x_.size(); }
  std::size_t group_count() const { return knots_.size(); }

  std::span<const double> x() const { return x_; }
  std::span<const std::uint8_t> y() const { return y_; }

  /// Distinct covariate values, strictly increasing.
  std::span<const double> knots() const { return knots_; }
  double knot(std::size_t g) const { return knots_[g]; }

  std::size_t group_begin(std::size_t g) const { return offsets_[g]; }
  std::size_t group_end(std::size_t g) const { return offsets_[g + 1]; }
  std::int64_t group_size(std::size_t g) const {
    return static_cast<std::int64_t>(offsets_[g + 1] - offsets_[g]);
  }

  /// prefix_sums()[i] = y_0 + ... + y_{i-1}; length n + 1.
  std::span<const std::int64_t> prefix_sums() const { return prefix_; }

  /// Successes over observations [begin, end).
  std::int64_t observation_sum(std::size_t begin, std::size_t end) const { return prefix_[end] - prefix_[begin]; }

  /// Z_{jk}: successes over tie groups j..k inclusive.
  std::int64_t successes(std::size_t j, std::size_t k) const { return prefix_[offsets_[k + 1]] - prefix_[offsets_[j]]; }

  /// n_{jk}: observations in tie groups j..k inclusive.
  std::int64_t trials(std::size_t j, std::size_t k) const {
    return static_cast<std::int64_t>(offsets_[k + 1] - offsets_[j]);
  }

  /// Index of the group whose knot equals x, or group_count() if none.
  std::size_t find_group(double x) const;

 private:
  friend SortedBinaryData build_sorted_data(std::span<const Observation> pairs);

  std::vector<double> x_;
  std::vector<std::uint8_t> y_;
  std::vector<double> knots_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int64_t> prefix_;
};

/// Stable-sorts by covariate and precomputes tie groups and prefix sums.
/// Throws std::invalid_argument on empty input, non-binary outcomes or
/// non-finite covariates.
SortedBinaryData build_sorted_data(std::span<const Observation> pairs);
SortedBinaryData build_sorted_data(std::span<const double> x, std::span<const int> y);

}  // namespace calband
