#pragma once

#include <cstddef>
#include <vector>

#include "calband/bands.hpp"
#include "calband/sorted_data.hpp"

namespace calband {

/// Real interval with explicit endpoint closure. A degenerate closed
/// interval [a, a] represents a single point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = false;

  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorts and fuses overlapping or touching intervals into maximal ones.
std::vector<Interval> merge_intervals(std::vector<Interval> pieces);

struct CalibrationVerdict {
  /// The diagonal leaves the band somewhere in [0, 1].
  bool classical_reject = false;
  /// Maximal subintervals of [0, 1] where x < L(x) or x > U(x).
  std::vector<Interval> miscalibrated_regions;
  /// sup over the domain of max{L(x) - x, x - U(x)}^+: how far the diagonal
  /// provably is from the calibration curve somewhere. Zero iff no rejection.
  double epsilon_certificate = 0.0;
  /// sup over the domain of max{U(x) - x, x - L(x)}: the band certifies
  /// |p(x) - x| <= calibration_radius for all x.
  double calibration_radius = 0.0;
};

/// Compares the band with the identity using exact interval arithmetic on
/// each step piece. With `extrapolate` the domain is [0, 1] and the knots
/// must lie in it; otherwise only [x_1, x_N] is examined.
CalibrationVerdict calibration_verdict(const StepBand& band, bool extrapolate = true);

/// Maximal x-intervals where lower > upper.
///
/// Both bounds are constant on each open piece between knots, and U is
/// nondecreasing, so a crossing on (x_i, x_{i+1}) implies one at x_i; the
/// knots and one representative per open piece are therefore exhaustive.
std::vector<Interval> crossing_regions(const StepBand& band);

/// True if lower > upper at some knot.
bool band_crosses(const StepBand& band);

/// sup_x {L(x) - U(x)}^+ / 2.
double gamma_hat(const StepBand& band);

/// Supremum of the alpha in (0,1) for which the raw band does not cross,
/// found by bisection to within 1e-4. Returns 1 if even alpha = 1 - 1e-6
/// gives no crossing; otherwise the smallest probed alpha that crossed.
double isotonicity_pvalue(const SortedBinaryData& data, const IndexPairFamily& family);

/// Lower (1 - alpha) confidence bound for the non-isotonicity
/// gamma(p) = sup_{x <= y} {p(x) - p(y)}, read off the raw band at alpha.
double gamma_lower_bound(const SortedBinaryData& data, const IndexPairFamily& family, double alpha);

struct IsotonicityReport {
  double alpha = 0.05;
  double p_value = 1.0;
  double gamma_hat = 0.0;
  std::vector<Interval> crossing_regions;
};

IsotonicityReport isotonicity_report(const SortedBinaryData& data, const IndexPairFamily& family, double alpha);

struct HosmerLemeshowResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;  // nonempty bins actually formed
  double degrees_of_freedom = 0.0;
};

/// Hosmer-Lemeshow test with `bins` equal-count groups of sorted predictions.
///
/// Bin b closes once the running count reaches ceil(b n / bins); a tie group
/// straddling that point stays whole in the lower bin, so heavy ties can
/// yield fewer bins. The p-value uses bins_formed - 2 degrees of freedom;
/// with no degrees of freedom left it is 1 for a zero statistic and 0
/// otherwise. Throws std::domain_error naming the bin if some bin has
/// E_g = 0 or E_g = n_g.
HosmerLemeshowResult hosmer_lemeshow(const SortedBinaryData& data, std::size_t bins = 10);

}  // namespace calband
