#include "calband/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "calband/core_stats.hpp"

namespace calband {

namespace {

constexpr double kPvalueTolerance = 1e-4;
constexpr double kAlphaCeiling = 1.0 - 1e-6;

bool nonempty(const Interval& iv) { return iv.lo < iv.hi || (iv.lo == iv.hi && iv.lo_closed && iv.hi_closed); }

// A step piece of one bound over [0, 1].
struct Piece {
  Interval span;
  double level;
};

// Lower bound pieces: [0, x_1) at 0, [x_i, x_{i+1}) at L_i, [x_N, 1] at L_N.
// Without extrapolation the domain is [x_1, x_N].
std::vector<Piece> lower_pieces(const StepBand& band, bool extrapolate) {
  std::vector<Piece> pieces;
  const std::size_t count = band.size();
  if (extrapolate && band.knots.front() > 0.0) pieces.push_back({{0.0, band.knots.front(), true, false}, 0.0});
  for (std::size_t i = 0; i < count; ++i) {
    const bool last = i + 1 == count;
    const double end = last ? (extrapolate ? 1.0 : band.knots[i]) : band.knots[i + 1];
    const Interval span{band.knots[i], end, true, last};
    if (nonempty(span)) pieces.push_back({span, band.lower[i]});
  }
  return pieces;
}

// Upper bound pieces: [0, x_1] at U_1, (x_{i-1}, x_i] at U_i, (x_N, 1] at 1.
std::vector<Piece> upper_pieces(const StepBand& band, bool extrapolate) {
  std::vector<Piece> pieces;
  const std::size_t count = band.size();
  for (std::size_t i = 0; i < count; ++i) {
    const double start = i > 0 ? band.knots[i - 1] : (extrapolate ? 0.0 : band.knots[0]);
    const Interval span{start, band.knots[i], i == 0, true};
    if (nonempty(span)) pieces.push_back({span, band.upper[i]});
  }
  if (extrapolate && band.knots.back() < 1.0) pieces.push_back({{band.knots.back(), 1.0, false, true}, 1.0});
  return pieces;
}

}  // namespace

std::vector<Interval> merge_intervals(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return !nonempty(iv); });
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  std::vector<Interval> merged;
  for (const auto& iv : pieces) {
    if (!merged.empty()) {
      Interval& cur = merged.back();
      const bool touches = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
      if (touches) {
        if (iv.hi > cur.hi) {
          cur.hi = iv.hi;
          cur.hi_closed = iv.hi_closed;
        } else if (iv.hi == cur.hi) {
          cur.hi_closed = cur.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    merged.push_back(iv);
  }
  return merged;
}

CalibrationVerdict calibration_verdict(const StepBand& band, bool extrapolate) {
  if (band.knots.empty()) throw std::invalid_argument("calibration_verdict: empty band");
  if (extrapolate && (band.knots.front() < 0.0 || band.knots.back() > 1.0)) {
    throw std::invalid_argument("calibration_verdict: band domain is not within [0,1]");
  }
  CalibrationVerdict verdict;
  std::vector<Interval> violations;

  for (const auto& [span, level] : lower_pieces(band, extrapolate)) {
    verdict.calibration_radius = std::max(verdict.calibration_radius, span.hi - level);
    // {x in span : x < level}
    if (level <= span.lo) continue;
    Interval v = span;
    if (level <= span.hi) {
      v.hi = level;
      v.hi_closed = false;
    }
    if (!nonempty(v)) continue;
    violations.push_back(v);
    verdict.epsilon_certificate = std::max(verdict.epsilon_certificate, level - span.lo);
  }

  for (const auto& [span, level] : upper_pieces(band, extrapolate)) {
    verdict.calibration_radius = std::max(verdict.calibration_radius, level - span.lo);
    // {x in span : x > level}
    if (level >= span.hi) continue;
    Interval v = span;
    if (level >= span.lo) {
      v.lo = level;
      v.lo_closed = false;
    }
    if (!nonempty(v)) continue;
    violations.push_back(v);
    verdict.epsilon_certificate = std::max(verdict.epsilon_certificate, span.hi - level);
  }

  verdict.miscalibrated_regions = merge_intervals(std::move(violations));
  verdict.classical_reject = !verdict.miscalibrated_regions.empty();
  return verdict;
}

std::vector<Interval> crossing_regions(const StepBand& band) {
  std::vector<Interval> pieces;
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (band.lower[i] > band.upper[i]) pieces.push_back({band.knots[i], band.knots[i], true, true});
    if (i + 1 < band.size() && band.lower[i] > band.upper[i + 1]) {
      pieces.push_back({band.knots[i], band.knots[i + 1], false, false});
    }
  }
  return merge_intervals(std::move(pieces));
}

bool band_crosses(const StepBand& band) {
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (band.lower[i] > band.upper[i]) return true;
  }
  return false;
}

double gamma_hat(const StepBand& band) {
  double gap = 0.0;
  for (std::size_t i = 0; i < band.size(); ++i) gap = std::max(gap, band.lower[i] - band.upper[i]);
  return gap / 2.0;
}

double isotonicity_pvalue(const SortedBinaryData& data, const IndexPairFamily& family) {
  if (!band_crosses(raw_band(data, family, kAlphaCeiling))) return 1.0;
  // Crossing is monotone in alpha: a larger alpha gives a narrower band.
  double lo = 0.0;
  double hi = kAlphaCeiling;
  while (hi - lo > kPvalueTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (band_crosses(raw_band(data, family, mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double gamma_lower_bound(const SortedBinaryData& data, const IndexPairFamily& family, double alpha) {
  return gamma_hat(raw_band(data, family, alpha));
}

IsotonicityReport isotonicity_report(const SortedBinaryData& data, const IndexPairFamily& family, double alpha) {
  const StepBand raw = raw_band(data, family, alpha);
  IsotonicityReport report;
  report.alpha = alpha;
  report.gamma_hat = gamma_hat(raw);
  report.crossing_regions = crossing_regions(raw);
  report.p_value = isotonicity_pvalue(data, family);
  return report;
}

HosmerLemeshowResult hosmer_lemeshow(const SortedBinaryData& data, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("hosmer_lemeshow: need at least 2 bins");
  const std::size_t n = data.size();
  if (n < bins) throw std::invalid_argument("hosmer_lemeshow: fewer observations than bins");
  if (data.knots().front() < 0.0 || data.knots().back() > 1.0) {
    throw std::invalid_argument("hosmer_lemeshow: predictions must lie in [0,1]");
  }

  struct Bin {
    double count = 0.0;
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Bin> formed;
  Bin current;
  std::size_t cumulative = 0;
  std::size_t next_cut = 1;
  const auto cut_point = [&](std::size_t b) { return (b * n + bins - 1) / bins; };

  for (std::size_t g = 0; g < data.group_count(); ++g) {
    const auto size = data.group_size(g);
    current.count += static_cast<double>(size);
    current.observed += static_cast<double>(data.successes(g, g));
    current.expected += static_cast<double>(size) * data.knot(g);
    cumulative += static_cast<std::size_t>(size);
    if (next_cut < bins && cumulative >= cut_point(next_cut)) {
      formed.push_back(current);
      current = Bin{};
      while (next_cut < bins && cumulative >= cut_point(next_cut)) ++next_cut;
    }
  }
  if (current.count > 0.0) formed.push_back(current);

  HosmerLemeshowResult result;
  result.bins = formed.size();
  for (std::size_t b = 0; b < formed.size(); ++b) {
    const Bin& bin = formed[b];
    if (bin.expected <= 0.0 || bin.expected >= bin.count) {
      throw std::domain_error("hosmer_lemeshow: bin " + std::to_string(b + 1) +
                              " has degenerate expected count (all predictions 0 or all 1)");
    }
    const double diff = bin.observed - bin.expected;
    result.statistic += diff * diff / (bin.expected * (1.0 - bin.expected / bin.count));
  }
  result.degrees_of_freedom = static_cast<double>(formed.size()) - 2.0;
  if (result.degrees_of_freedom > 0.0) {
    result.p_value = chi_square_sf(result.statistic, result.degrees_of_freedom);
  } else {
    result.p_value = result.statistic <= 0.0 ? 1.0 : 0.0;
  }
  return result;
}

}  // namespace calband
