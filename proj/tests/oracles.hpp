#pragma once

// Slow reference implementations used only by the tests. None of them call
// the library routine they are checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "calband/bands.hpp"
#include "calband/core_stats.hpp"
#include "calband/isotonic.hpp"
#include "calband/sorted_data.hpp"

namespace oracle {

// P(Bin(m, xi) <= z) by direct summation of the pmf in long double.
inline long double binom_cdf(std::int64_t z, std::int64_t m, long double xi) {
  if (z < 0) return 0.0L;
  if (z >= m) return 1.0L;
  if (xi <= 0.0L) return 1.0L;
  if (xi >= 1.0L) return 0.0L;
  long double sum = 0.0L;
  for (std::int64_t i = 0; i <= z; ++i) {
    const long double log_pmf = std::lgammal(m + 1.0L) - std::lgammal(i + 1.0L) - std::lgammal(m - i + 1.0L) +
                                i * std::log(xi) + (m - i) * std::log1p(-xi);
    sum += std::exp(log_pmf);
  }
  return std::min(sum, 1.0L);
}

// max{xi in [0,1] : P(Bin(m,xi) <= z) >= delta}, by bisection.
inline double cp_upper(std::int64_t z, std::int64_t m, double delta) {
  if (z >= m) return 1.0;
  long double lo = 0.0L;
  long double hi = 1.0L;
  for (int it = 0; it < 80; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (binom_cdf(z, m, mid) >= delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(lo);
}

// min{xi in [0,1] : P(Bin(m,xi) <= z-1) <= 1 - delta}, by bisection.
inline double cp_lower(std::int64_t z, std::int64_t m, double delta) {
  if (z <= 0) return 0.0;
  long double lo = 0.0L;
  long double hi = 1.0L;
  for (int it = 0; it < 80; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (binom_cdf(z - 1, m, mid) <= 1.0L - delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<double>(hi);
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-15) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

// Isotonic least squares over weighted points by trying every partition into
// consecutive blocks (each fitted at its weighted mean) and keeping the best
// feasible one. Exponential; meant for at most ~14 points.
inline std::vector<double> isotonic_by_partitions(const std::vector<double>& values, const std::vector<double>& weights) {
  const std::size_t n = values.size();
  std::vector<double> best_fit;
  double best_loss = std::numeric_limits<double>::infinity();
  const std::uint32_t cuts = n > 1 ? static_cast<std::uint32_t>(n - 1) : 0;
  for (std::uint32_t mask = 0; mask < (1u << cuts); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    double previous = -std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      const bool close = i + 1 == n || (mask >> i) & 1u;
      if (!close) continue;
      double sum = 0.0;
      double weight = 0.0;
      for (std::size_t t = start; t <= i; ++t) {
        sum += values[t] * weights[t];
        weight += weights[t];
      }
      const double mean = sum / weight;
      if (mean < previous) feasible = false;
      for (std::size_t t = start; t <= i; ++t) fit[t] = mean;
      previous = mean;
      start = i + 1;
    }
    if (!feasible) continue;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += weights[i] * (fit[i] - values[i]) * (fit[i] - values[i]);
    if (loss < best_loss - 1e-13) {
      best_loss = loss;
      best_fit = fit;
    }
  }
  return best_fit;
}

// Raw band by looping over every admissible pair for every knot.
inline calband::StepBand naive_raw_band(const calband::SortedBinaryData& data, const calband::IndexPairFamily& family,
                                        double alpha) {
  const std::size_t groups = data.group_count();
  const double delta = alpha / static_cast<double>(family.correction());
  calband::StepBand band;
  band.knots.assign(data.knots().begin(), data.knots().end());
  band.lower.assign(groups, 0.0);
  band.upper.assign(groups, 1.0);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t j = 0; j < groups; ++j) {
      for (std::size_t k = j; k < groups; ++k) {
        if (!family.contains(j, k)) continue;
        const auto z = data.successes(j, k);
        const auto m = data.trials(j, k);
        if (j >= g) band.upper[g] = std::min(band.upper[g], calband::cp_upper(z, m, delta));
        if (k <= g) band.lower[g] = std::max(band.lower[g], calband::cp_lower(z, m, delta));
      }
    }
  }
  return band;
}

// Yang-Barber band minimizing over all pairs.
inline calband::StepBand naive_yb_band(const calband::SortedBinaryData& data, const calband::IsotonicFit& fit,
                                       double alpha) {
  const std::size_t groups = data.group_count();
  std::vector<double> sums(groups + 1, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    sums[g + 1] = sums[g] + static_cast<double>(data.group_size(g)) * fit.level_at_group(g);
  }
  const double count = static_cast<double>(groups);
  const double log_term = std::log((count * count + count) / alpha);
  calband::StepBand band;
  band.knots.assign(data.knots().begin(), data.knots().end());
  band.lower.assign(groups, 0.0);
  band.upper.assign(groups, 1.0);
  for (std::size_t g = 0; g < groups; ++g) {
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < groups; ++j) {
      for (std::size_t k = j; k < groups; ++k) {
        const auto m = data.trials(j, k);
        const double mean = (sums[k + 1] - sums[j]) / static_cast<double>(m);
        const double radius = std::sqrt(log_term / (2.0 * static_cast<double>(m)));
        if (j >= g) upper = std::min(upper, mean + radius);
        if (k <= g) lower = std::max(lower, mean - radius);
      }
    }
    band.upper[g] = std::min(1.0, upper);
    band.lower[g] = std::max(0.0, lower);
  }
  return band;
}

// All (j, k) whose covariate block is {x_1..x_n} ∩ [r/K, s/K] for some r <= s.
inline std::set<std::pair<std::size_t, std::size_t>> rounded_pairs(const std::vector<double>& knots, std::int64_t grid) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  const double k = static_cast<double>(grid);
  const auto r_min = static_cast<std::int64_t>(std::floor(knots.front() * k)) - 2;
  const auto r_max = static_cast<std::int64_t>(std::ceil(knots.back() * k)) + 2;
  for (std::int64_t r = r_min; r <= r_max; ++r) {
    for (std::int64_t s = r; s <= r_max; ++s) {
      const double lo = static_cast<double>(r) / k;
      const double hi = static_cast<double>(s) / k;
      std::size_t first = knots.size();
      std::size_t last = 0;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (knots[i] >= lo && knots[i] <= hi) {
          first = std::min(first, i);
          last = i;
        }
      }
      if (first < knots.size()) out.insert({first, last});
    }
  }
  return out;
}

// Band bounds evaluated pointwise from the continuity rules, for grid scans.
inline double upper_at(const calband::StepBand& band, double x) {
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (x <= band.knots[i]) return band.upper[i];
  }
  return 1.0;
}

inline double lower_at(const calband::StepBand& band, double x) {
  double value = 0.0;
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (band.knots[i] <= x) value = band.lower[i];
  }
  return value;
}

inline std::vector<calband::Observation> random_observations(std::mt19937_64& rng, std::size_t n, bool ties,
                                                             const std::function<double(double)>& p) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<calband::Observation> obs(n);
  for (auto& o : obs) {
    o.x = ties ? std::round(unif(rng) * 20.0) / 20.0 : unif(rng);
    o.y = unif(rng) < p(o.x) ? 1 : 0;
  }
  return obs;
}

}  // namespace oracle
