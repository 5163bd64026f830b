#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "calband/isotonic.hpp"
#include "calband/sorted_data.hpp"

namespace calband {

/// Tie-group index pair (j, k), j <= k, 0-based.
struct IndexPair {
  std::size_t j = 0;
  std::size_t k = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// The set of index intervals whose Clopper-Pearson bounds are combined.
///
/// Both supported families are products: every admissible start group j
/// pairs with every admissible end group k >= j. The full family admits all
/// groups on both sides. The rounded family with grid K admits exactly the
/// index blocks {x_j..x_k} = {x_1..x_n} ∩ [r/K, s/K], r <= s integers; j is
/// then a group whose covariate is the first one at or above some grid point
/// and k the last one at or below some grid point.
///
/// correction() is the Bonferroni divisor: the band uses delta =
/// alpha / correction() for each one-sided bound, and it equals twice the
/// number of pairs because each pair contributes an upper and a lower bound.
class IndexPairFamily {
 public:
  enum class Kind { full, rounded };

  static IndexPairFamily full(const SortedBinaryData& data);
  static IndexPairFamily rounded(const SortedBinaryData& data, std::int64_t grid);

  Kind kind() const { return kind_; }
  /// K for a rounded family, 0 for the full family.
  std::int64_t grid() const { return grid_; }
  std::size_t group_count() const { return group_count_; }

  /// Admissible start groups, increasing.
  std::span<const std::size_t> left_starts() const { return left_starts_; }
  /// Admissible end groups, increasing.
  std::span<const std::size_t> right_ends() const { return right_ends_; }

  /// Number of pairs |J|.
  std::uint64_t size() const { return size_; }
  std::uint64_t correction() const { return 2 * size_; }

  bool contains(std::size_t j, std::size_t k) const;
  /// Materialized pair list, sorted by (j, k).
  std::vector<IndexPair> pairs() const;

 private:
  IndexPairFamily(Kind kind, std::int64_t grid, std::size_t groups, std::vector<std::size_t> starts,
                  std::vector<std::size_t> ends);

  Kind kind_ = Kind::full;
  std::int64_t grid_ = 0;
  std::size_t group_count_ = 0;
  std::vector<std::size_t> left_starts_;
  std::vector<std::size_t> right_ends_;
  std::uint64_t size_ = 0;
};

inline IndexPairFamily full_index_family(const SortedBinaryData& data) { return IndexPairFamily::full(data); }
inline IndexPairFamily rounded_index_family(const SortedBinaryData& data, std::int64_t grid) {
  return IndexPairFamily::rounded(data, grid);
}

/// Pair of monotone step functions stored at the distinct covariates.
///
/// Continuity: the upper bound is left-continuous, U(x) = upper[i] on
/// (x_{i-1}, x_i]; the lower bound is right-continuous, L(x) = lower[i] on
/// [x_i, x_{i+1}). Beyond the data U = 1 on (x_N, inf) and L = 0 on
/// (-inf, x_1).
struct StepBand {
  std::vector<double> knots;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return knots.size(); }
};

struct BandValue {
  double lower = 0.0;
  double upper = 1.0;
};

enum class BandMethod { raw, noncrossing, yang_barber };

std::string_view to_string(BandMethod method);
/// Accepts "raw", "nc" / "noncrossing", "yb" / "yang-barber".
BandMethod parse_band_method(std::string_view text);

/// Bonferroni-combined Clopper-Pearson band. May cross (lower > upper).
StepBand raw_band(const SortedBinaryData& data, const IndexPairFamily& family, double alpha);

/// Raw band widened pointwise to contain the isotonic fit.
StepBand noncrossing_band(const StepBand& raw, const IsotonicFit& fit);

/// Hoeffding band around isotonic block averages over the full family,
/// computed on constancy endpoints only. Levels are clipped to [0, 1].
StepBand yb_band(const SortedBinaryData& data, const IsotonicFit& fit, double alpha);

/// Band value at x. Outside [x_1, x_N] the result is the constant
/// extrapolation (0, upper[0]) on the left and (lower[N-1], 1) on the right
/// when `extrapolate` is set, NaN otherwise.
BandValue evaluate_band(const StepBand& band, double x, bool extrapolate = true);

/// Convenience dispatcher. `fit` must come from `data`; the family is
/// ignored for the Yang-Barber band, which always uses the full family.
StepBand build_band(const SortedBinaryData& data, const IsotonicFit& fit, const IndexPairFamily& family,
                    BandMethod method, double alpha);

}  // namespace calband
