#include "calband/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "calband/core_stats.hpp"

namespace calband {

namespace {

// Bisection in beta_quantile is accurate to ~1e-12; a candidate is skipped
// only if its bound provably lies beyond the running optimum by this much,
// so skipping never changes the computed extremum.
constexpr double kSkipSlack = 1e-10;
constexpr double kSkipLogMargin = 1e-7;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

// Cheap certificates that a pair's Clopper-Pearson bound cannot improve the
// running optimum of a sweep. A pmf lower bound on the binomial tail is tried
// first, then one incomplete-beta evaluation; only pairs that survive both
// pay for a quantile bisection.
class PairScreen {
 public:
  PairScreen(std::size_t n, double delta) : delta_(delta), log_delta_(std::log(delta)), log_factorial_(n + 1, 0.0) {
    for (std::size_t i = 2; i <= n; ++i) log_factorial_[i] = log_gamma(static_cast<double>(i) + 1.0);
  }

  // False if cp_upper(z, m, delta) >= best is certain.
  bool upper_may_improve(std::int64_t z, std::int64_t m, double best) {
    if (z == m) return false;
    const double t = best + kSkipSlack;
    if (t >= 1.0) return true;
    if (static_cast<double>(z) / static_cast<double>(m) >= t) return false;
    // P(Bin(m,t) <= z) >= delta implies the upper bound is >= t.
    if (log_pmf(z, m, t) >= log_delta_ + kSkipLogMargin) return false;
    const double tail = reg_inc_beta(static_cast<double>(m - z), static_cast<double>(z + 1), 1.0 - t);
    return tail < delta_ * (1.0 + kSkipLogMargin);
  }

  // False if cp_lower(z, m, delta) <= best is certain.
  bool lower_may_improve(std::int64_t z, std::int64_t m, double best) {
    if (z == 0) return false;
    const double t = best - kSkipSlack;
    if (t <= 0.0) return true;
    if (static_cast<double>(z) / static_cast<double>(m) <= t) return false;
    // P(Bin(m,t) >= z) >= delta implies the lower bound is <= t.
    if (log_pmf(z, m, t) >= log_delta_ + kSkipLogMargin) return false;
    const double tail = reg_inc_beta(static_cast<double>(z), static_cast<double>(m - z + 1), t);
    return tail < delta_ * (1.0 + kSkipLogMargin);
  }

 private:
  double log_pmf(std::int64_t z, std::int64_t m, double t) {
    if (t != cached_t_) {
      cached_t_ = t;
      log_t_ = std::log(t);
      log1m_t_ = std::log1p(-t);
    }
    const auto zi = static_cast<std::size_t>(z);
    const auto mi = static_cast<std::size_t>(m);
    double value = log_factorial_[mi] - log_factorial_[zi] - log_factorial_[mi - zi];
    if (z > 0) value += static_cast<double>(z) * log_t_;
    if (m > z) value += static_cast<double>(m - z) * log1m_t_;
    return value;
  }

  double delta_;
  double log_delta_;
  std::vector<double> log_factorial_;
  double cached_t_ = std::numeric_limits<double>::quiet_NaN();
  double log_t_ = 0.0;
  double log1m_t_ = 0.0;
};

}  // namespace

std::string_view to_string(BandMethod method) {
  switch (method) {
    case BandMethod::raw:
      return "raw";
    case BandMethod::noncrossing:
      return "nc";
    case BandMethod::yang_barber:
      return "yb";
  }
  return "unknown";
}

BandMethod parse_band_method(std::string_view text) {
  if (text == "raw") return BandMethod::raw;
  if (text == "nc" || text == "noncrossing") return BandMethod::noncrossing;
  if (text == "yb" || text == "yang-barber") return BandMethod::yang_barber;
  throw std::invalid_argument("unknown band method '" + std::string(text) + "' (expected raw, nc or yb)");
}

StepBand raw_band(const SortedBinaryData& data, const IndexPairFamily& family, double alpha) {
  check_alpha(alpha);
  const std::size_t groups = data.group_count();
  if (family.group_count() != groups) throw std::invalid_argument("raw_band: family built for different data");
  const double delta = alpha / static_cast<double>(family.correction());
  if (delta < kMinDelta) {
    throw std::domain_error("raw_band: alpha / correction underflows; use a rounded index family");
  }

  StepBand band;
  const auto knots = data.knots();
  band.knots.assign(knots.begin(), knots.end());
  band.lower.assign(groups, 0.0);
  band.upper.assign(groups, 1.0);

  const auto starts = family.left_starts();
  const auto ends = family.right_ends();
  PairScreen screen(data.size(), delta);

  // Upper: U(x_g) = min over pairs with j >= g. Rows j descending, suffix min.
  double best = 1.0;
  for (std::size_t si = starts.size(); si-- > 0;) {
    const std::size_t j = starts[si];
    for (std::size_t ei = ends.size(); ei-- > 0 && ends[ei] >= j;) {
      const std::size_t k = ends[ei];
      const std::int64_t z = data.successes(j, k);
      const std::int64_t m = data.trials(j, k);
      if (!screen.upper_may_improve(z, m, best)) continue;
      best = std::min(best, cp_upper(z, m, delta));
    }
    const std::size_t first = si == 0 ? 0 : starts[si - 1] + 1;
    for (std::size_t g = first; g <= j; ++g) band.upper[g] = best;
  }

  // Lower: L(x_g) = max over pairs with k <= g. Rows k ascending, prefix max.
  best = 0.0;
  for (std::size_t ei = 0; ei < ends.size(); ++ei) {
    const std::size_t k = ends[ei];
    for (std::size_t si = 0; si < starts.size() && starts[si] <= k; ++si) {
      const std::size_t j = starts[si];
      const std::int64_t z = data.successes(j, k);
      const std::int64_t m = data.trials(j, k);
      if (!screen.lower_may_improve(z, m, best)) continue;
      best = std::max(best, cp_lower(z, m, delta));
    }
    const std::size_t stop = ei + 1 < ends.size() ? ends[ei + 1] : groups;
    for (std::size_t g = k; g < stop; ++g) band.lower[g] = best;
  }
  return band;
}

StepBand noncrossing_band(const StepBand& raw, const IsotonicFit& fit) {
  if (raw.size() != fit.group_count()) throw std::invalid_argument("noncrossing_band: band and fit differ in size");
  StepBand band = raw;
  for (std::size_t g = 0; g < band.size(); ++g) {
    const double level = fit.level_at_group(g);
    band.lower[g] = std::min(band.lower[g], level);
    band.upper[g] = std::max(band.upper[g], level);
  }
  return band;
}

StepBand yb_band(const SortedBinaryData& data, const IsotonicFit& fit, double alpha) {
  check_alpha(alpha);
  const std::size_t groups = data.group_count();
  if (fit.group_count() != groups) throw std::invalid_argument("yb_band: fit built for different data");

  const std::vector<double> fitted_sums = isotonic_prefix_sums(data, fit);
  const double group_count = static_cast<double>(groups);
  const double log_term = std::log((group_count * group_count + group_count) / alpha);
  const ConstancyEndpoints ends = constancy_endpoints(fit);

  StepBand band;
  const auto knots = data.knots();
  band.knots.assign(knots.begin(), knots.end());
  band.lower.assign(groups, 0.0);
  band.upper.assign(groups, 1.0);

  // The optimum over k for a fixed start is attained at a right end of a
  // constancy block (and symmetrically for the lower bound), so only those
  // are scanned. The running min/max over rows keeps the full j >= g range.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = groups; j-- > 0;) {
    for (auto it = std::lower_bound(ends.right_ends.begin(), ends.right_ends.end(), j); it != ends.right_ends.end();
         ++it) {
      const std::int64_t m = data.trials(j, *it);
      const double mean = (fitted_sums[*it + 1] - fitted_sums[j]) / static_cast<double>(m);
      best = std::min(best, mean + std::sqrt(log_term / (2.0 * static_cast<double>(m))));
    }
    band.upper[j] = std::min(1.0, best);
  }

  best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < groups; ++k) {
    for (const std::size_t j : ends.left_starts) {
      if (j > k) break;
      const std::int64_t m = data.trials(j, k);
      const double mean = (fitted_sums[k + 1] - fitted_sums[j]) / static_cast<double>(m);
      best = std::max(best, mean - std::sqrt(log_term / (2.0 * static_cast<double>(m))));
    }
    band.lower[k] = std::max(0.0, best);
  }
  return band;
}

BandValue evaluate_band(const StepBand& band, double x, bool extrapolate) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (band.knots.empty()) throw std::invalid_argument("evaluate_band: empty band");
  const double first = band.knots.front();
  const double last = band.knots.back();
  if (!extrapolate && (x < first || x > last)) return {nan, nan};

  BandValue value;
  // Upper is left-continuous: first knot >= x.
  const auto up = std::lower_bound(band.knots.begin(), band.knots.end(), x);
  value.upper = up == band.knots.end() ? 1.0 : band.upper[static_cast<std::size_t>(up - band.knots.begin())];
  // Lower is right-continuous: last knot <= x.
  const auto lo = std::upper_bound(band.knots.begin(), band.knots.end(), x);
  value.lower = lo == band.knots.begin() ? 0.0 : band.lower[static_cast<std::size_t>(lo - band.knots.begin()) - 1];
  return value;
}

StepBand build_band(const SortedBinaryData& data, const IsotonicFit& fit, const IndexPairFamily& family,
                    BandMethod method, double alpha) {
  switch (method) {
    case BandMethod::raw:
      return raw_band(data, family, alpha);
    case BandMethod::noncrossing:
      return noncrossing_band(raw_band(data, family, alpha), fit);
    case BandMethod::yang_barber:
      return yb_band(data, fit, alpha);
  }
  throw std::invalid_argument("build_band: unknown method");
}

}  // namespace calband
