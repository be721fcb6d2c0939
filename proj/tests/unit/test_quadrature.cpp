#include "iga/errors.hpp"
#include "iga/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace iga;

TEST(GaussLegendre, TwoPointNodes) {
  const GaussRule g = gauss_legendre(2);
  ASSERT_EQ(g.size(), 2);
  EXPECT_NEAR(g.x[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g.x[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g.w[0], 0.5, 1e-15);
  EXPECT_NEAR(g.w[1], 0.5, 1e-15);
}

TEST(GaussLegendre, ThreePointNodes) {
  const GaussRule g = gauss_legendre(3);
  EXPECT_NEAR(g.x[0], 0.5 - 0.5 * std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(g.x[1], 0.5, 1e-15);
  EXPECT_NEAR(g.w[0], 5.0 / 18.0, 1e-15);
  EXPECT_NEAR(g.w[1], 8.0 / 18.0, 1e-15);
}

TEST(GaussLegendre, ExactUpToDegree2nMinus1) {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule g = gauss_legendre(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(g.w[i], 0.0);
      EXPECT_TRUE(g.x[i] > 0.0 && g.x[i] < 1.0);
      if (i > 0) {
        EXPECT_GT(g.x[i], g.x[i - 1]);
      }
      wsum += g.w[i];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (int d = 0; d <= 2 * n; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], d);
      if (d <= 2 * n - 1) {
        EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
      } else if (n <= 6) {
        EXPECT_GT(std::abs(s - 1.0 / (d + 1)), 1e-12) << "n=" << n;
      }
    }
  }
}

TEST(GaussLegendre, SymmetricAboutMidpoint) {
  const GaussRule g = gauss_legendre(7);
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(g.x[i] + g.x[6 - i], 1.0, 1e-15);
    EXPECT_NEAR(g.w[i], g.w[6 - i], 1e-15);
  }
}

TEST(GaussLegendre, RejectsEmptyRule) {
  EXPECT_THROW(gauss_legendre(0), DomainError);
  EXPECT_THROW(QuadratureRule(-1), DomainError);
}

TEST(QuadratureRule, DefaultPointsForDegree) {
  const QuadratureRule q = QuadratureRule::for_degree(3);
  EXPECT_EQ(q.q, 4);
  EXPECT_EQ(q.points_per_element(), 16);
  EXPECT_EQ(q.line.size(), 4);
}
