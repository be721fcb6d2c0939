#include "iga/errors.hpp"
#include "iga/splines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace iga;

namespace {

// Textbook recursive definition, half-open spans; the right end of the
// parameter range is assigned to the last non-empty span.
double cox_de_boor(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) {
    const double last = t.back();
    if (x == last) {
      int k = static_cast<int>(t.size()) - 2;
      while (t[k] == t[k + 1]) --k;
      return i == k ? 1.0 : 0.0;
    }
    return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (t[i + p] > t[i]) a = (x - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, x);
  if (t[i + p + 1] > t[i + 1]) b = (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, x);
  return a + b;
}

// de Boor's algorithm for a polynomial curve.
Vec2 de_boor_point(const std::vector<double>& t, int p, const std::vector<Vec2>& c, double x) {
  int k = p;
  while (k + 1 < static_cast<int>(t.size()) - p - 1 && t[k + 1] <= x) ++k;
  std::vector<Vec2> d(p + 1);
  for (int j = 0; j <= p; ++j) d[j] = c[j + k - p];
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const double den = t[j + 1 + k - r] - t[j + k - p];
      const double a = den > 0 ? (x - t[j + k - p]) / den : 0.0;
      d[j] = (1.0 - a) * d[j - 1] + a * d[j];
    }
  }
  return d[p];
}

std::vector<double> knots_of(const KnotVector& kv) { return {kv.knots().begin(), kv.knots().end()}; }

KnotVector irregular(int p) {
  std::vector<double> k(p + 1, 0.0);
  for (double v : {0.15, 0.4, 0.7}) k.push_back(v);
  if (p >= 2) k.insert(k.begin() + p + 2, 0.4);  // one reduced-continuity knot
  k.insert(k.end(), p + 1, 1.0);
  return KnotVector(p, k);
}

}  // namespace

TEST(KnotVector, RejectsInvalidKnots) {
  EXPECT_THROW(KnotVector(2, {0, 0, 0, 0.5, 0.4, 1, 1, 1}), DomainError);
  EXPECT_THROW(KnotVector(2, {0, 0, 0.5, 1, 1, 1}), DomainError);
  EXPECT_THROW(KnotVector(1, {0, 0, 0.5, 0.5, 1, 1}), DomainError);
  EXPECT_THROW(KnotVector(1, {0, 0, 1, 2, 2}), DomainError);
}

TEST(KnotVector, FindSpanEdges) {
  const KnotVector kv = KnotVector::uniform(2, 4);
  EXPECT_EQ(kv.dimension(), 6);
  EXPECT_EQ(kv.find_span(0.0), 2);
  EXPECT_EQ(kv.find_span(0.25), 3);
  EXPECT_EQ(kv.find_span(1.0), 5);
  EXPECT_THROW(kv.find_span(1.5), DomainError);
  EXPECT_THROW(kv.find_span(-0.1), DomainError);
  const KnotVector r = irregular(2).reversed();
  EXPECT_NEAR(r[3], 0.3, 1e-15);  // 1 - 0.7
  EXPECT_EQ(r.reversed(), irregular(2));
}

TEST(BSpline, MatchesRecursiveDefinition) {
  for (int p = 1; p <= 4; ++p) {
    const KnotVector kv = irregular(p);
    const std::vector<double> t = knots_of(kv);
    for (int s = 0; s <= 200; ++s) {
      const double x = s / 200.0;
      const BasisDerivs b = bspline_eval(kv, x, 0);
      for (int i = 0; i < kv.dimension(); ++i) {
        const double expect = cox_de_boor(t, i, p, x);
        const int j = i - b.first;
        const double got = (j >= 0 && j <= p) ? b(0, j) : 0.0;
        ASSERT_NEAR(got, expect, 1e-13) << "p=" << p << " i=" << i << " x=" << x;
      }
    }
  }
}

TEST(BSpline, PartitionOfUnityAndNonNegativity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 1; p <= 5; ++p) {
    const KnotVector kv = KnotVector::uniform(p, 7);
    for (int s = 0; s < 100; ++s) {
      const BasisDerivs b = bspline_eval(kv, u(rng), 2);
      double sum = 0.0, dsum = 0.0;
      for (int j = 0; j <= p; ++j) {
        EXPECT_GE(b(0, j), -1e-15);
        sum += b(0, j);
        dsum += b(1, j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
      EXPECT_NEAR(dsum, 0.0, 1e-11);
    }
  }
}

TEST(BSpline, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (int p = 1; p <= 4; ++p) {
    const KnotVector kv = irregular(p);
    const std::vector<double> t = knots_of(kv);
    for (double x : {0.05, 0.2, 0.33, 0.5, 0.61, 0.9}) {
      const BasisDerivs b = bspline_eval(kv, x, 2);
      for (int j = 0; j <= p; ++j) {
        const int i = b.first + j;
        const double fd1 = (cox_de_boor(t, i, p, x + h) - cox_de_boor(t, i, p, x - h)) / (2 * h);
        EXPECT_NEAR(b(1, j), fd1, 1e-6 * (1 + std::abs(fd1)));
        if (p >= 2) {
          const double hh = 1e-4;
          const double fd2 =
              (cox_de_boor(t, i, p, x + hh) - 2 * cox_de_boor(t, i, p, x) + cox_de_boor(t, i, p, x - hh)) / (hh * hh);
          EXPECT_NEAR(b(2, j), fd2, 1e-4 * (1 + std::abs(fd2)));
        }
      }
    }
  }
}

TEST(BSpline, OrdersAboveDegreeAreZero) {
  const BasisDerivs b = bspline_eval(KnotVector::uniform(1, 3), 0.4, 3);
  for (int m = 2; m <= 3; ++m) {
    for (int j = 0; j <= 1; ++j) EXPECT_EQ(b(m, j), 0.0);
  }
}

TEST(Nurbs, RationalBasisPartitionAndDerivative) {
  const KnotVector kv = irregular(3);
  std::vector<double> w(kv.dimension());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + 0.3 * std::sin(1.7 * i);
  const double h = 1e-6;
  for (double x : {0.1, 0.3, 0.55, 0.8}) {
    const BasisDerivs r = nurbs_basis_eval(kv, w, x, 1);
    const BasisDerivs rp = nurbs_basis_eval(kv, w, x + h, 0), rm = nurbs_basis_eval(kv, w, x - h, 0);
    double sum = 0.0;
    for (int j = 0; j <= 3; ++j) {
      sum += r(0, j);
      ASSERT_EQ(rp.first, r.first);
      EXPECT_NEAR(r(1, j), (rp(0, j) - rm(0, j)) / (2 * h), 1e-6);
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Curve, PolynomialCurveMatchesDeBoor) {
  const int p = 3;
  const KnotVector kv = irregular(p);
  std::vector<Vec2> c;
  for (int i = 0; i < kv.dimension(); ++i) c.emplace_back(i * 0.7, std::cos(i));
  const NurbsCurve curve(kv, c, std::vector<double>(c.size(), 1.0));
  for (int s = 0; s <= 50; ++s) {
    const double x = s / 50.0;
    EXPECT_LT((curve.point(x) - de_boor_point(knots_of(kv), p, c, x)).norm(), 1e-13);
  }
}

TEST(Curve, CircularArcsAreExact) {
  for (const auto& [r, a0, a1] : std::vector<std::tuple<double, double, double>>{
           {1.0, 0.0, std::numbers::pi / 2}, {44.7e-3, 0.1, 1.2}, {2.0, -0.5, 3.0}, {1.5, 0.0, 2 * std::numbers::pi}}) {
    const NurbsCurve c = make_circular_arc(r, a0, a1);
    const int segments = static_cast<int>(std::ceil((a1 - a0) / (std::numbers::pi / 2) - 1e-12));
    EXPECT_EQ(c.knots().num_elements(), segments);
    for (int s = 0; s <= 400; ++s) {
      const auto [x, dx] = c.point_and_tangent(s / 400.0);
      ASSERT_NEAR(x.norm(), r, 1e-14 * r);
      EXPECT_NEAR(x.dot(dx), 0.0, 1e-12 * r * dx.norm());
      EXPECT_GT(x.x() * dx.y() - x.y() * dx.x(), 0.0);  // counter-clockwise
    }
    EXPECT_NEAR(std::atan2(c.point(0).y(), c.point(0).x()), std::remainder(a0, 2 * std::numbers::pi), 1e-14);
  }
}

TEST(Curve, LineIsUniformSpeed) {
  const NurbsCurve l = make_line(Vec2(1, 2), Vec2(4, -2));
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    const auto [p, d] = l.point_and_tangent(x);
    EXPECT_LT((p - Vec2(1 + 3 * x, 2 - 4 * x)).norm(), 1e-15);
    EXPECT_LT((d - Vec2(3, -4)).norm(), 1e-13);
  }
}

TEST(Refinement, KnotInsertionPreservesGeometry) {
  const NurbsCurve arc = make_circular_arc(1.3, 0.2, 2.9);
  const std::vector<double> ins = {0.1, 0.37, 0.37, 0.8};
  const NurbsCurve fine = h_refine(arc, ins);
  EXPECT_EQ(fine.knots().size(), arc.knots().size() + ins.size());
  for (int s = 0; s <= 100; ++s) EXPECT_LT((fine.point(s / 100.0) - arc.point(s / 100.0)).norm(), 1e-14);

  const NurbsPatch patch = NurbsPatch::ruled(make_circular_arc(2.0, 0.0, 1.0), make_circular_arc(1.0, 0.0, 1.0));
  const auto iu = uniform_insertions(patch.knots_u(), 3);
  const std::vector<double> iv = {0.5};
  const NurbsPatch pf = h_refine(patch, iu, iv);
  for (double xi : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (double eta : {0.0, 0.4, 1.0}) {
      const MapSample a = patch.eval(xi, eta), b = pf.eval(xi, eta);
      EXPECT_LT((a.point - b.point).norm(), 1e-14);
      EXPECT_LT((a.jacobian - b.jacobian).norm(), 1e-12);
    }
  }
  const std::vector<double> too_many = {0.5, 0.5, 0.5};
  EXPECT_THROW(h_refine(make_circular_arc(1.0, 0.0, 1.0), too_many), DomainError);
}

TEST(Refinement, UniformInsertionsSplitEverySpan) {
  const KnotVector kv = KnotVector::from_breakpoints(2, std::vector<double>{0.0, 0.3, 1.0});
  const auto ins = uniform_insertions(kv, 2);
  ASSERT_EQ(ins.size(), 2u);
  EXPECT_NEAR(ins[0], 0.15, 1e-15);
  EXPECT_NEAR(ins[1], 0.65, 1e-15);
}

TEST(Patch, RuledSectorJacobianAndArea) {
  // outer arc as South side: u counter-clockwise, v inward
  const NurbsPatch p = NurbsPatch::ruled(make_circular_arc(2.0, 0.0, std::numbers::pi / 2),
                                         make_circular_arc(1.0, 0.0, std::numbers::pi / 2));
  double area = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const MapSample s = p.eval((i + 0.5) / n, (j + 0.5) / n);
      EXPECT_GT(s.det, 0.0);
      area += s.det / (n * n);
    }
  }
  EXPECT_NEAR(area, 3.0 * std::numbers::pi / 4.0, 1e-4);
  // finite-difference Jacobian
  const double h = 1e-6;
  const MapSample s = p.eval(0.3, 0.6);
  const Vec2 du = (p.point(0.3 + h, 0.6) - p.point(0.3 - h, 0.6)) / (2 * h);
  const Vec2 dv = (p.point(0.3, 0.6 + h) - p.point(0.3, 0.6 - h)) / (2 * h);
  EXPECT_LT((s.jacobian.col(0) - du).norm(), 1e-7);
  EXPECT_LT((s.jacobian.col(1) - dv).norm(), 1e-7);
  EXPECT_NEAR(s.det, s.jacobian.determinant(), 1e-14);
}

TEST(Patch, BoundaryCurvesMatchSurface) {
  const NurbsPatch p = NurbsPatch::ruled(make_circular_arc(1.0, 0.3, 1.1), make_circular_arc(1.7, 0.3, 1.1));
  for (double t : {0.0, 0.4, 1.0}) {
    EXPECT_LT((p.boundary(Side::South).point(t) - p.point(t, 0)).norm(), 1e-15);
    EXPECT_LT((p.boundary(Side::North).point(t) - p.point(t, 1)).norm(), 1e-15);
    EXPECT_LT((p.boundary(Side::West).point(t) - p.point(0, t)).norm(), 1e-15);
    EXPECT_LT((p.boundary(Side::East).point(t) - p.point(1, t)).norm(), 1e-15);
  }
  const auto [lo, hi] = p.bounding_box();
  for (double a : {0.0, 0.5, 1.0}) {
    const Vec2 x = p.point(a, 1 - a);
    EXPECT_TRUE(x.x() >= lo.x() && x.y() >= lo.y() && x.x() <= hi.x() && x.y() <= hi.y());
  }
}

TEST(Patch, InverseMapRoundTrip) {
  const NurbsPatch p = NurbsPatch::ruled(make_circular_arc(1.0, 0.2, 1.4), make_circular_arc(2.0, 0.2, 1.4));
  for (double xi : {0.05, 0.5, 0.93}) {
    for (double eta : {0.0, 0.31, 0.99}) {
      const InverseMapResult r = inverse_map(p, p.point(xi, eta));
      ASSERT_TRUE(r.converged);
      EXPECT_NEAR(r.param.x(), xi, 1e-10);
      EXPECT_NEAR(r.param.y(), eta, 1e-10);
    }
  }
  EXPECT_FALSE(inverse_map(p, Vec2(-5.0, -5.0)).converged);
}
