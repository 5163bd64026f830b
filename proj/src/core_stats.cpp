#include "calband/core_stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace calband {

namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
constexpr double kCfEpsilon = 1e-15;
constexpr double kCfTiny = 1e-300;
constexpr int kCfMaxIterations = 100000;
constexpr double kQuantileAbsTol = 1e-12;
constexpr double kQuantileRelTol = 1e-9;

[[noreturn]] void domain_fail(const std::string& what) { throw std::domain_error(what); }

// lgamma(x) - [(x - 1/2) log x - x + log sqrt(2 pi)]
double stirling_remainder(double x) {
  if (x < 15.0) {
    return log_gamma(x) - ((x - 0.5) * std::log(x) - x + kLnSqrt2Pi);
  }
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x2 = x * x;
  return (s0 - (s1 - (s2 - (s3 - s4 / x2) / x2) / x2) / x2) / x;
}

// x log(x / np) + np - x, accurate when x is close to np.
double deviance_term(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log of x^a (1-x)^b / B(a,b) for 0 < x < 1.
double log_beta_prefactor(double a, double b, double x) {
  const double total = a + b;
  return -deviance_term(a, total * x) - deviance_term(b, total * (1.0 - x)) +
         0.5 * std::log(a * b / total) - kLnSqrt2Pi + stirling_remainder(total) -
         stirling_remainder(a) - stirling_remainder(b);
}

// Continued fraction for I_x(a,b) * a * B(a,b) / (x^a (1-x)^b).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kCfTiny) d = kCfTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kCfTiny) d = kCfTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kCfTiny) c = kCfTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kCfTiny) d = kCfTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kCfTiny) c = kCfTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfEpsilon) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) domain_fail("Clopper-Pearson: delta must lie in (0,1)");
  if (delta < kMinDelta) {
    domain_fail("Clopper-Pearson: delta underflows (below 1e-300); the Bonferroni divisor is too large");
  }
}

void check_count(std::int64_t z, std::int64_t m) {
  if (m < 1) domain_fail("binomial count: trials must be >= 1");
  if (z < 0 || z > m) domain_fail("binomial count: successes must lie in [0, trials]");
}

}  // namespace

BinomialCount::BinomialCount(std::int64_t z, std::int64_t m) : successes(z), trials(m) { check_count(z, m); }

double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    domain_fail("reg_inc_beta: shape parameters must be positive and finite");
  }
  if (!(x >= 0.0 && x <= 1.0)) domain_fail("reg_inc_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double front = std::exp(log_beta_prefactor(a, b, x));
    return front * beta_continued_fraction(a, b, x) / a;
  }
  const double front = std::exp(log_beta_prefactor(b, a, 1.0 - x));
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) domain_fail("beta_quantile: p must lie in [0,1]");
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    domain_fail("beta_quantile: shape parameters must be positive and finite");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    const double width = hi - lo;
    if (width <= kQuantileAbsTol && width <= kQuantileRelTol * hi) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (reg_inc_beta(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double binom_cdf(std::int64_t z, std::int64_t m, double xi) {
  if (m < 1) domain_fail("binom_cdf: trials must be >= 1");
  if (!(xi >= 0.0 && xi <= 1.0)) domain_fail("binom_cdf: xi must lie in [0,1]");
  if (z < -1) domain_fail("binom_cdf: z must be >= -1");
  if (z < 0) return 0.0;
  if (z >= m) return 1.0;
  if (m <= 50) {
    // C(m, i) is exact in double for m <= 50.
    double sum = 0.0;
    double binom = 1.0;
    for (std::int64_t i = 0; i <= z; ++i) {
      if (i > 0) binom = binom * static_cast<double>(m - i + 1) / static_cast<double>(i);
      sum += binom * std::pow(xi, static_cast<double>(i)) * std::pow(1.0 - xi, static_cast<double>(m - i));
    }
    return sum > 1.0 ? 1.0 : sum;
  }
  return reg_inc_beta(static_cast<double>(m - z), static_cast<double>(z + 1), 1.0 - xi);
}

double cp_upper(std::int64_t z, std::int64_t m, double delta) {
  check_count(z, m);
  check_delta(delta);
  if (z == m) return 1.0;
  // qbeta(1 - delta, z + 1, m - z) written through the reflection
  // I_x(a,b) = 1 - I_{1-x}(b,a) so the bisection works on the small tail.
  return 1.0 - beta_quantile(delta, static_cast<double>(m - z), static_cast<double>(z + 1));
}

double cp_lower(std::int64_t z, std::int64_t m, double delta) {
  check_count(z, m);
  check_delta(delta);
  if (z == 0) return 0.0;
  return beta_quantile(delta, static_cast<double>(z), static_cast<double>(m + 1 - z));
}

double reg_upper_inc_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) domain_fail("reg_upper_inc_gamma: a must be positive");
  if (!(x >= 0.0)) domain_fail("reg_upper_inc_gamma: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_front = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    // Series for the lower function P(a, x).
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kCfMaxIterations; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * kCfEpsilon) break;
    }
    return 1.0 - sum * std::exp(log_front);
  }
  // Continued fraction for Q(a, x).
  double b = x + 1.0 - a;
  double c = 1.0 / kCfTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kCfMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kCfTiny) d = kCfTiny;
    c = b + an / c;
    if (std::fabs(c) < kCfTiny) c = kCfTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfEpsilon) break;
  }
  return std::exp(log_front) * h;
}

double chi_square_sf(double stat, double df) {
  if (!(df > 0.0)) domain_fail("chi_square_sf: degrees of freedom must be positive");
  if (std::isnan(stat)) domain_fail("chi_square_sf: statistic is NaN");
  if (stat <= 0.0) return 1.0;
  return reg_upper_inc_gamma(0.5 * df, 0.5 * stat);
}

}  // namespace calband
