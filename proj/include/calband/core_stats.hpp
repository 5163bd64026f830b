#pragma once

// Exact beta/binomial routines and Clopper-Pearson bounds.
//
// Every function here is a pure function of its arguments and may be called
// concurrently. Domain violations throw std::domain_error.

#include <cstdint>

namespace calband {

/// Smallest admissible tail probability for a Clopper-Pearson bound. Smaller
/// values (e.g. from an enormous Bonferroni divisor) are rejected rather than
/// silently producing degenerate bounds.
inline constexpr double kMinDelta = 1e-300;

/// z successes out of m trials, 0 <= z <= m, m >= 1.
struct BinomialCount {
  std::int64_t successes = 0;
  std::int64_t trials = 1;

  BinomialCount() = default;
  BinomialCount(std::int64_t z, std::int64_t m);
};

/// Regularized incomplete beta function I_x(a, b).
///
/// Continued-fraction evaluation (modified Lentz) on the side of the mode
/// where it converges fastest, with I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
/// The prefactor x^a (1-x)^b / B(a,b) is formed from deviance and Stirling
/// remainder terms so that large a, b keep full relative accuracy.
double reg_inc_beta(double a, double b, double x);

/// Quantile of the Beta(a, b) distribution: x with I_x(a,b) = p.
///
/// Bracketed bisection on reg_inc_beta. The bracket is shrunk to 1e-12
/// absolute (and 1e-9 relative for tiny quantiles).
double beta_quantile(double p, double a, double b);

/// Binomial distribution function P(Bin(m, xi) <= z). z = -1 gives 0 and
/// z >= m gives 1. Direct summation for m <= 50, otherwise
/// I_{1-xi}(m - z, z + 1).
double binom_cdf(std::int64_t z, std::int64_t m, double xi);

/// Upper Clopper-Pearson bound max{xi : P(Bin(m,xi) <= z) >= delta}.
double cp_upper(std::int64_t z, std::int64_t m, double delta);
inline double cp_upper(BinomialCount c, double delta) { return cp_upper(c.successes, c.trials, delta); }

/// Lower Clopper-Pearson bound min{xi : P(Bin(m,xi) <= z - 1) <= 1 - delta}.
double cp_lower(std::int64_t z, std::int64_t m, double delta);
inline double cp_lower(BinomialCount c, double delta) { return cp_lower(c.successes, c.trials, delta); }

/// log Gamma(x) for x > 0. Reentrant.
double log_gamma(double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double reg_upper_inc_gamma(double a, double x);

/// Upper tail P(X >= stat) of a chi-square variable with df > 0 degrees of
/// freedom.
double chi_square_sf(double stat, double df);

}  // namespace calband
