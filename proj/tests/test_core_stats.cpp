#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "calband/core_stats.hpp"
#include "oracles.hpp"

using namespace calband;

TEST(RegIncBeta, TrivialValues) {
  EXPECT_NEAR(reg_inc_beta(1, 1, 0.3), 0.3, 1e-15);
  EXPECT_EQ(reg_inc_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(reg_inc_beta(2, 3, 1.0), 1.0);
}

TEST(RegIncBeta, MatchesQuadrature) {
  // Beta(3,2) density is 12 t^2 (1-t).
  const double quad = oracle::integrate([](double t) { return 12.0 * t * t * (1.0 - t); }, 0.0, 0.5);
  EXPECT_NEAR(reg_inc_beta(3, 2, 0.5), quad, 1e-12);
  EXPECT_NEAR(quad, 0.3125, 1e-14);
}

TEST(RegIncBeta, MatchesQuadratureOnGrid) {
  for (const double a : {0.5, 1.0, 2.5, 7.0}) {
    for (const double b : {0.8, 1.0, 3.0, 11.0}) {
      const double norm = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
      const auto density = [&](double t) { return norm * std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
      for (const double x : {0.1, 0.35, 0.6, 0.9}) {
        if (a < 1.0 || b < 1.0) continue;  // singular endpoints defeat plain Simpson
        EXPECT_NEAR(reg_inc_beta(a, b, x), oracle::integrate(density, 0.0, x, 1e-14), 1e-11)
            << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
}

TEST(RegIncBeta, SymmetryAndMonotone) {
  double previous = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    const double v = reg_inc_beta(4.5, 9.25, x);
    EXPECT_GE(v, previous);
    EXPECT_NEAR(v, 1.0 - reg_inc_beta(9.25, 4.5, 1.0 - x), 1e-14);
    previous = v;
  }
}

TEST(RegIncBeta, LargeParametersKeepAccuracy) {
  // Binomial tail at m = 20000 against long-double summation.
  const std::int64_t m = 20000;
  for (const std::int64_t z : {9800, 10000, 10150}) {
    const double xi = 0.5;
    const double expected = static_cast<double>(oracle::binom_cdf(z, m, xi));
    EXPECT_NEAR(binom_cdf(z, m, xi), expected, 1e-12 + 1e-9 * expected) << "z=" << z;
  }
}

TEST(RegIncBeta, DomainErrors) {
  EXPECT_THROW(reg_inc_beta(0, 1, 0.5), std::domain_error);
  EXPECT_THROW(reg_inc_beta(1, -2, 0.5), std::domain_error);
  EXPECT_THROW(reg_inc_beta(1, 1, 1.5), std::domain_error);
  EXPECT_THROW(reg_inc_beta(1, 1, std::nan("")), std::domain_error);
}

TEST(BetaQuantile, Values) {
  EXPECT_NEAR(beta_quantile(0.5, 1, 1), 0.5, 1e-12);
  EXPECT_EQ(beta_quantile(0.0, 5, 2), 0.0);
  EXPECT_EQ(beta_quantile(1.0, 5, 2), 1.0);
  const double x = beta_quantile(0.95, 6, 5);
  EXPECT_NEAR(reg_inc_beta(6, 5, x), 0.95, 1e-10);
  EXPECT_THROW(beta_quantile(1.2, 1, 1), std::domain_error);
}

TEST(BinomCdf, Values) {
  EXPECT_EQ(binom_cdf(-1, 10, 0.4), 0.0);
  EXPECT_EQ(binom_cdf(10, 10, 0.4), 1.0);
  // (1 + 10 + 45 + 120) / 1024
  EXPECT_NEAR(binom_cdf(3, 10, 0.5), 0.171875, 1e-15);
  EXPECT_THROW(binom_cdf(3, 0, 0.5), std::domain_error);
}

TEST(BinomCdf, BothPathsAgreeWithSummation) {
  for (const std::int64_t m : {5, 50, 51, 200}) {
    for (std::int64_t z = 0; z <= m; z += std::max<std::int64_t>(1, m / 7)) {
      for (const double xi : {0.01, 0.3, 0.77}) {
        EXPECT_NEAR(binom_cdf(z, m, xi), static_cast<double>(oracle::binom_cdf(z, m, xi)), 1e-13);
      }
    }
  }
}

TEST(ClopperPearson, TrivialBranches) {
  EXPECT_EQ(cp_upper(7, 7, 0.01), 1.0);
  EXPECT_NEAR(cp_upper(0, 1, 0.05), 0.95, 1e-12);
  EXPECT_EQ(cp_lower(0, 12, 0.01), 0.0);
  EXPECT_NEAR(cp_lower(1, 1, 0.05), 0.05, 1e-12);
}

TEST(ClopperPearson, CdfInversionOracle) {
  EXPECT_NEAR(cp_upper(5, 10, 0.025), oracle::cp_upper(5, 10, 0.025), 1e-9);
  EXPECT_NEAR(cp_lower(5, 10, 0.025), oracle::cp_lower(5, 10, 0.025), 1e-9);
}

TEST(ClopperPearson, Duality) {
  for (std::int64_t m = 1; m <= 30; ++m) {
    for (std::int64_t z = 0; z <= m; ++z) {
      for (const double delta : {0.1, 0.01, 1e-6}) {
        EXPECT_NEAR(cp_lower(z, m, delta), 1.0 - cp_upper(m - z, m, delta), 1e-11);
      }
    }
  }
}

TEST(ClopperPearson, MonotoneAndOrdered) {
  for (const std::int64_t m : {1, 9, 40, 333}) {
    for (const double delta : {0.5, 0.05, 1e-5}) {
      double previous = 0.0;
      for (std::int64_t z = 0; z <= m; ++z) {
        const double u = cp_upper(z, m, delta);
        EXPECT_GE(u, previous);
        EXPECT_GE(u, cp_lower(z, m, delta));
        EXPECT_GE(u, cp_upper(z, m, delta * 2.0 < 1.0 ? delta * 2.0 : delta));
        previous = u;
      }
    }
  }
}

TEST(ClopperPearson, ValidityBySimulation) {
  std::mt19937_64 rng(11);
  const std::int64_t m = 60;
  const double delta = 0.1;
  const int reps = 20000;
  for (const double q : {0.05, 0.4, 0.9}) {
    std::binomial_distribution<std::int64_t> draw(m, q);
    int hits = 0;
    for (int r = 0; r < reps; ++r) hits += q <= cp_upper(draw(rng), m, delta) ? 1 : 0;
    const double freq = static_cast<double>(hits) / reps;
    EXPECT_GE(freq, 1.0 - delta - 3.0 * std::sqrt(delta * (1.0 - delta) / reps)) << "q=" << q;
  }
}

TEST(ClopperPearson, UnderflowingDeltaRejected) {
  EXPECT_THROW(cp_upper(1, 5, 1e-310), std::domain_error);
  EXPECT_THROW(cp_lower(1, 5, 0.0), std::domain_error);
  EXPECT_THROW(BinomialCount(6, 5), std::domain_error);
}

TEST(ChiSquare, SurvivalFunction) {
  EXPECT_EQ(chi_square_sf(0.0, 8.0), 1.0);
  // df = 2 is exponential with mean 2.
  EXPECT_NEAR(chi_square_sf(3.0, 2.0), std::exp(-1.5), 1e-14);
  // df = 4: e^{-x/2} (1 + x/2)
  EXPECT_NEAR(chi_square_sf(5.0, 4.0), std::exp(-2.5) * 3.5, 1e-14);
  EXPECT_NEAR(chi_square_sf(15.507313055865453, 8.0), 0.05, 1e-12);
}
