#include "iga/assembly.hpp"
#include "iga/errors.hpp"
#include "iga/models.hpp"
#include "iga/mortar.hpp"
#include "iga/trace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace iga;

namespace {

constexpr double kPi = std::numbers::pi;

struct TwoSides {
  TwoDomainModel model;
  DiscreteSpace srt, sst;
  TraceSpace trt, tst;
  SpMat krt, kst;
  Eigen::VectorXd jrt, jst;
  HarmonicSet set;
  CSpMat grt, gst;

  SaddleSystem saddle(double alpha) const { return assemble_saddle(krt, kst, grt, gst, set, alpha, jrt, jst); }
};

// Rotor source is given in the rotor frame and follows the rotor offset.
TwoSides build(TwoDomainModel m, int degree, int sub, int max_order, double rotor_offset = 0.0) {
  TwoSides t;
  t.model = std::move(m);
  SpaceOptions o;
  o.degree = degree;
  o.subdivisions = sub;
  t.srt = build_space(t.model.rt, o);
  t.sst = build_space(t.model.st, o);
  const QuadratureRule q = QuadratureRule::for_degree(degree);
  t.krt = assemble_stiffness(t.model.rt, t.srt, t.model.mat_rt, q);
  t.kst = assemble_stiffness(t.model.st, t.sst, t.model.mat_st, q);
  const double c = std::cos(rotor_offset), s = std::sin(rotor_offset);
  t.jrt = assemble_load(t.model.rt, t.srt, [&](const Vec2& x) {
    const Vec2 r(c * x.x() + s * x.y(), -s * x.x() + c * x.y());
    return 2.0 + r.x() + 0.5 * r.y() * r.y();
  }, q);
  t.jst = assemble_load(t.model.st, t.sst, [](const Vec2& x) { return 1.0 - x.y(); }, q);
  t.trt = trace_on_airgap(t.srt, t.model.rt);
  t.tst = trace_on_airgap(t.sst, t.model.st);
  t.set = select_harmonics(Symmetry::Periodic, 2 * kPi, max_order);
  t.grt = assemble_coupling(t.trt, t.srt.num_dofs(), t.set, CouplingSide::Rotor, degree + 2);
  t.gst = assemble_coupling(t.tst, t.sst.num_dofs(), t.set, CouplingSide::Stator, degree + 2);
  return t;
}

}  // namespace

TEST(Harmonics, SelectionBySymmetry) {
  EXPECT_EQ(select_harmonics(Symmetry::Periodic, 2 * kPi, 3).orders, (std::vector<int>{-3, -2, -1, 0, 1, 2, 3}));
  EXPECT_EQ(select_harmonics(Symmetry::Antiperiodic, kPi / 3, 15).orders,
            (std::vector<int>{-15, -9, -3, 3, 9, 15}));
  EXPECT_EQ(select_harmonics(Symmetry::Periodic, kPi / 3, 12).orders, (std::vector<int>{-12, -6, 0, 6, 12}));
  EXPECT_THROW(select_harmonics(Symmetry::Antiperiodic, kPi / 3, 2), DomainError);
  const HarmonicSet f = first_harmonics(Symmetry::Antiperiodic, kPi / 3, 2);
  EXPECT_EQ(f.orders, (std::vector<int>{-9, -3, 3, 9}));
  EXPECT_EQ(f.max_order(), 9);
  EXPECT_EQ(symmetry_from_name(symmetry_name(Symmetry::Antiperiodic)), Symmetry::Antiperiodic);
}

TEST(Harmonics, RotationIsUnitaryGroup) {
  const HarmonicSet s = select_harmonics(Symmetry::Antiperiodic, kPi / 3, 15);
  const Eigen::VectorXcd a = rotation_matrix(s, 0.3), b = rotation_matrix(s, -1.1), ab = rotation_matrix(s, -0.8);
  for (int i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(std::abs(a(i)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(a(i) * b(i) - ab(i)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(a(i) - std::exp(cplx(0.0, s.orders[i] * 0.3))), 0.0, 1e-15);
  }
}

TEST(Harmonics, MassMatchesClosedForm) {
  const HarmonicSet s = select_harmonics(Symmetry::Periodic, 2 * kPi, 4);
  const double t0 = 0.2, t1 = 1.7;
  const Eigen::MatrixXcd m = harmonic_mass(s, t0, t1);
  for (int a = 0; a < s.size(); ++a) {
    for (int b = 0; b < s.size(); ++b) {
      const int d = s.orders[a] - s.orders[b];
      const cplx ref = d == 0 ? cplx(t1 - t0)
                              : (std::exp(cplx(0.0, d * t1)) - std::exp(cplx(0.0, d * t0))) / cplx(0.0, d);
      EXPECT_NEAR(std::abs(m(a, b) - ref), 0.0, 1e-13);
    }
  }
  const Eigen::MatrixXcd full = harmonic_mass(s, 0.0, 2 * kPi);
  EXPECT_LT((full - 2 * kPi * Eigen::MatrixXcd::Identity(s.size(), s.size())).norm(), 1e-12);
}

TEST(Coupling, FullRingColumnSumsAreFourierOfOne) {
  const TwoSides t = build(build_full_ring(1.5), 2, 3, 4);
  // enough points per element to integrate the harmonics to round-off
  const CSpMat grt = assemble_coupling(t.trt, t.srt.num_dofs(), t.set, CouplingSide::Rotor, 14);
  const CSpMat gst = assemble_coupling(t.tst, t.sst.num_dofs(), t.set, CouplingSide::Stator, 14);
  for (int l = 0; l < t.set.size(); ++l) {
    const cplx srt = Eigen::VectorXcd(grt.col(l)).sum();
    const cplx sst = Eigen::VectorXcd(gst.col(l)).sum();
    const double ref = t.set.orders[l] == 0 ? 2 * kPi : 0.0;
    EXPECT_NEAR(std::abs(srt - ref), 0.0, 1e-12) << "l=" << t.set.orders[l];
    EXPECT_NEAR(std::abs(sst + ref), 0.0, 1e-12) << "l=" << t.set.orders[l];
  }
  EXPECT_LT(t.trt.radius_deviation(), 1e-14);
  EXPECT_NEAR(t.trt.extent(), 2 * kPi, 1e-14);
}

TEST(Coupling, ConjugateSymmetricColumns) {
  // real trace functions: the column of -l is the conjugate of the column of l
  const TwoSides t = build(build_quarter_ring(1.5), 2, 4, 3);
  const int n = t.set.size();
  for (int l = 0; l < n; ++l) {
    const Eigen::VectorXcd a = t.gst.col(l), b = t.gst.col(n - 1 - l);
    EXPECT_LT((a - b.conjugate()).norm(), 1e-14 * (1 + a.norm()));
  }
}

TEST(Saddle, HermitianAndConstraintSatisfied) {
  const TwoSides t = build(build_quarter_ring(1.5), 2, 4, 3);
  const SaddleSystem sys = t.saddle(0.0);
  EXPECT_LT(symmetry_defect(sys.matrix()), 1e-15);
  const CoupledSolution a = solve_coupled(sys);
  const CoupledSolution b = solve_coupled_complex(sys);
  EXPECT_LT(a.residual, 1e-10);
  EXPECT_LT(a.constraint, 1e-12);
  EXPECT_LT((a.u_rt - b.u_rt).norm() / a.u_rt.norm(), 1e-10);
  EXPECT_LT((a.u_st - b.u_st).norm() / a.u_st.norm(), 1e-10);
  // the multipliers carry the conditioning of the harmonic mass on a quarter arc
  EXPECT_LT((a.lambda - b.lambda).norm() / a.lambda.norm(), 1e-7);
  // real field: lambda_{-l} = conj(lambda_l)
  const int n = t.set.size();
  for (int l = 0; l < n; ++l) EXPECT_LT(std::abs(a.lambda(l) - std::conj(a.lambda(n - 1 - l))), 1e-12);
  EXPECT_LT(std::abs(multiplier_field(t.set, a.lambda, 0.4).imag()), 1e-12);
}

TEST(Saddle, RealMultiplierRoundTrip) {
  const HarmonicSet s = select_harmonics(Symmetry::Antiperiodic, kPi / 3, 15);
  Eigen::VectorXcd lam(s.size());
  lam << cplx(0.1, 0.2), cplx(-1.0, 0.5), cplx(3.0, -2.0), cplx(3.0, 2.0), cplx(-1.0, -0.5), cplx(0.1, -0.2);
  const Eigen::VectorXd ab = multipliers_to_real(s, lam);
  ASSERT_EQ(ab.size(), 6);
  // (a_3, b_3): lambda_3 = (a + i b)/2
  EXPECT_NEAR(ab(0), 6.0, 1e-15);
  EXPECT_NEAR(ab(1), 4.0, 1e-15);
  EXPECT_LT((multipliers_from_real(s, ab) - lam).norm(), 1e-15);
}

TEST(Saddle, SweepMatchesDirectSolve) {
  const TwoSides t = build(build_full_ring(1.5), 2, 3, 5);
  const CoupledSweep sweep(t.krt, t.kst, t.grt, t.gst, t.set, t.jrt, t.jst);
  for (double alpha : {0.0, 0.37, 2.1}) {
    const CoupledSolution a = sweep.solve(alpha);
    const CoupledSolution b = solve_coupled(t.saddle(alpha));
    EXPECT_LT((a.u_rt - b.u_rt).norm() / b.u_rt.norm(), 1e-10);
    EXPECT_LT((a.u_st - b.u_st).norm() / b.u_st.norm(), 1e-10);
    EXPECT_LT((a.lambda - b.lambda).norm() / b.lambda.norm(), 1e-9);
  }
}

TEST(Saddle, RotationOperatorEqualsRotatedGeometry) {
  // rotating the rotor through R(alpha) or through its geometry gives the
  // same coefficients; the multipliers differ by R(alpha)
  const double alpha = 0.3;
  const TwoSides a = build(build_full_ring(1.5, 0.0), 2, 3, 4);
  const TwoSides b = build(build_full_ring(1.5, alpha), 2, 3, 4, alpha);
  const CoupledSolution sa = solve_coupled(a.saddle(alpha));
  const CoupledSolution sb = solve_coupled(b.saddle(0.0));
  EXPECT_LT((sa.u_rt - sb.u_rt).norm() / sa.u_rt.norm(), 1e-10);
  EXPECT_LT((sa.u_st - sb.u_st).norm() / sa.u_st.norm(), 1e-10);
  const Eigen::VectorXcd rl = rotation_matrix(a.set, alpha).cwiseProduct(sa.lambda);
  EXPECT_LT((rl - sb.lambda).norm() / sb.lambda.norm(), 1e-9);
}

TEST(InfSup, ScalesWithStiffness) {
  const TwoSides t = build(build_quarter_ring(1.5), 2, 4, 2);
  const SaddleSystem sys = t.saddle(0.0);
  const Eigen::MatrixXcd m = harmonic_mass(t.set, t.tst.theta_begin(), t.tst.theta_end());
  const InfSupResult r1 = infsup_constant(SpdSolver(sys.k), sys.b, m);
  const InfSupResult r4 = infsup_constant(SpdSolver(SpMat(4.0 * sys.k)), sys.b, m);
  ASSERT_TRUE(r1.resolved());
  EXPECT_GT(r1.beta, 0.0);
  EXPECT_NEAR(r4.beta, r1.beta / 2, 1e-10 * r1.beta);
  EXPECT_NEAR(r1.beta, r1.sigma(0), 1e-15);
  for (int i = 1; i < r1.sigma.size(); ++i) EXPECT_GE(r1.sigma(i), r1.sigma(i - 1));
}

TEST(InfSup, UnresolvedMassReportsNan) {
  const TwoSides t = build(build_quarter_ring(1.5), 2, 4, 8);
  const SaddleSystem sys = t.saddle(0.0);
  const InfSupResult r =
      infsup_constant(SpdSolver(sys.k), sys.b, harmonic_mass(t.set, t.tst.theta_begin(), t.tst.theta_end()));
  EXPECT_FALSE(r.resolved());
  EXPECT_TRUE(std::isnan(r.beta));
}
