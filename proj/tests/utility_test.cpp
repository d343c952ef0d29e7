#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dermkt/utility.hpp"

using namespace dermkt;

TEST(Isoelastic, Values) {
  EXPECT_DOUBLE_EQ(u_value(isoelastic(1.0), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(u_value(isoelastic(2.0), 2.0), 0.5);
  EXPECT_NEAR(u_value(isoelastic(1.0), std::exp(1.0)), 1.0, 1e-15);
}

TEST(Isoelastic, Marginal) {
  EXPECT_DOUBLE_EQ(u_marginal(isoelastic(1.0), 2.0), 0.5);
  EXPECT_DOUBLE_EQ(u_marginal(isoelastic(2.0), 2.0), 0.25);
  const double h = 1e-4;
  const UtilitySpec u = isoelastic(1.5);
  const double fd = (u_value(u, 3.0 + h) - u_value(u, 3.0 - h)) / (2 * h);
  EXPECT_LE(std::abs(u_marginal(u, 3.0) - fd), 1e-6);
}

TEST(Isoelastic, InverseMarginal) {
  EXPECT_DOUBLE_EQ(u_inverse_marginal(isoelastic(1.0), 4.0), 0.25);
  EXPECT_DOUBLE_EQ(u_inverse_marginal(isoelastic(2.0), 0.25), 2.0);
  for (double eta : {0.5, 1.0, 3.0}) {
    for (double m : {0.1, 1.0, 10.0}) {
      const UtilitySpec u = isoelastic(eta);
      EXPECT_NEAR(u_marginal(u, u_inverse_marginal(u, m)) / m, 1.0, 1e-12) << eta << " " << m;
    }
  }
}

TEST(Isoelastic, DomainErrors) {
  EXPECT_THROW(u_value(isoelastic(1.0), 0.0), DomainError);
  EXPECT_THROW(u_marginal(isoelastic(2.0), -1.0), DomainError);
  EXPECT_THROW(u_inverse_marginal(isoelastic(2.0), 0.0), DomainError);
}

TEST(Isoelastic, LongDoubleAgreesWithDouble) {
  const Isoelastic<long double> ul{2.5L};
  const Isoelastic<double> ud{2.5};
  EXPECT_NEAR(static_cast<double>(value(ul, 7.0L)), value(ud, 7.0), 1e-14);
  EXPECT_NEAR(static_cast<double>(curvature(ul, 7.0L)), curvature(ud, 7.0), 1e-16);
}

TEST(Isoelastic, StrictlyDecreasingMarginalAndRoundTripOnGrid) {
  const double z_cap = 1000.0;
  for (double eta : {0.5, 1.0, 1.7, 3.0}) {
    const UtilitySpec u = isoelastic(eta);
    double prev = u_marginal(u, 1e-3);
    for (double z = 1e-3 * 1.1; z <= z_cap; z *= 1.1) {
      const double m = u_marginal(u, z);
      EXPECT_LT(m, prev);
      prev = m;
      EXPECT_NEAR(u_inverse_marginal(u, m) / z, 1.0, 1e-10);
    }
  }
}

TEST(Isoelastic, FiniteDifferencesMatchMarginalOnGrid) {
  const double h = 1e-5;
  for (double eta : {0.5, 1.0, 2.0, 3.0}) {
    const UtilitySpec u = isoelastic(eta);
    for (double z = 0.5; z <= 1000.0; z *= 1.7) {
      const double fd = (u_value(u, z + h) - u_value(u, z - h)) / (2 * h);
      EXPECT_NEAR(fd, u_marginal(u, z), 1e-5) << eta << " " << z;
      const double fd2 = (u_marginal(u, z + h) - u_marginal(u, z - h)) / (2 * h);
      EXPECT_NEAR(fd2, u_curvature(u, z), 1e-5);
    }
  }
}

TEST(QuadraticCost, ReferenceGenerator) {
  const CostSpec c = quadratic_cost(0.01, 1.0, 0.0, 1000.0);
  EXPECT_DOUBLE_EQ(c_marginal(c, 100.0), 3.0);
  EXPECT_DOUBLE_EQ(c_inverse_marginal(c, 3.0), 100.0);
  EXPECT_DOUBLE_EQ(c_value(c, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(c_inverse_marginal(c, 25.0), 1200.0);  // unclipped
}

TEST(QuadraticCost, ConvexAndDifferentiable) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const CostSpec c = quadratic_cost(0.005 + 0.05 * unit(rng), 2.0 * unit(rng), 0.0, 1000.0);
    const double y1 = 1000.0 * unit(rng);
    const double y2 = 1000.0 * unit(rng);
    const double t = unit(rng);
    EXPECT_LE(c_value(c, t * y1 + (1 - t) * y2),
              t * c_value(c, y1) + (1 - t) * c_value(c, y2) + 1e-12 * (1 + c_value(c, 1000.0)));
    const double h = 1e-4;
    EXPECT_NEAR((c_value(c, y1 + h) - c_value(c, y1 - h)) / (2 * h), c_marginal(c, y1), 1e-5);
  }
}
