#include "fixtures.hpp"
#include "iga/errors.hpp"
#include "iga/postproc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace iga;

namespace {

constexpr double kPi = std::numbers::pi;

struct Synthetic {
  std::vector<double> alpha, psi;
};

// psi(alpha) = sum_k b_k cos(k theta_e + phi_k), theta_e = pi alpha / pitch
Synthetic synthetic(int n, double pitch, const std::vector<std::tuple<int, double, double>>& terms, double a0 = 0.0) {
  Synthetic s;
  for (int j = 0; j < n; ++j) {
    const double a = a0 + j * pitch / n;
    double v = 0.0;
    for (const auto& [k, b, phi] : terms) v += b * std::cos(k * kPi * a / pitch + phi);
    s.alpha.push_back(a);
    s.psi.push_back(v);
  }
  return s;
}

}  // namespace

TEST(EmfSpectrum, OddHarmonicsOfSyntheticFluxLinkage) {
  const double pitch = kPi / 3, omega = 1000.0 * 2 * kPi / 60;
  const Synthetic s = synthetic(60, pitch, {{1, 0.2, 0.1}, {3, 0.01, -0.4}, {5, 0.002, 1.0}});
  const Spectrum sp = emf_spectrum(s.alpha, s.psi, pitch, omega);
  const double w_el = 3 * omega;  // three pole pairs
  EXPECT_NEAR(sp.f_el, 50.0, 1e-12);
  EXPECT_EQ(sp.modes(), 60);
  EXPECT_NEAR(sp.magnitude[1], 0.2 * w_el, 1e-10);
  EXPECT_NEAR(sp.magnitude[3], 3 * 0.01 * w_el, 1e-10);
  EXPECT_NEAR(sp.magnitude[5], 5 * 0.002 * w_el, 1e-10);
  for (int k : {0, 2, 4, 7, 9}) EXPECT_NEAR(sp.magnitude[k], 0.0, 1e-10);
  const double ref = std::hypot(3 * 0.01, 5 * 0.002) / 0.2;
  EXPECT_NEAR(thd(sp), ref, 1e-12);
  // e(t) = -dpsi/dt at the first sample, t = alpha / omega
  const double e0 = 0.2 * w_el * std::sin(0.1) + 0.03 * w_el * std::sin(-0.4) + 0.01 * w_el * std::sin(1.0);
  EXPECT_NEAR(sp.waveform[0], e0, 1e-9);
  ASSERT_EQ(sp.waveform.size(), 120u);
  EXPECT_NEAR(sp.waveform[60], -e0, 1e-9);
}

TEST(EmfSpectrum, PhaseOfFundamental) {
  const double pitch = kPi / 3;
  const Synthetic s = synthetic(24, pitch, {{1, 1.0, 0.0}});
  const Spectrum sp = emf_spectrum(s.alpha, s.psi, pitch, 1.0);
  // psi = cos(theta): e = w sin(theta) = w Re(-i e^{i theta})
  EXPECT_NEAR(std::arg(sp.coeff[1]), -kPi / 2, 1e-12);
}

TEST(EmfSpectrum, RejectsBadInput) {
  const double pitch = kPi / 3;
  Synthetic s = synthetic(12, pitch, {{1, 1.0, 0.0}});
  EXPECT_THROW(emf_spectrum(s.alpha, s.psi, pitch, 0.0), DomainError);
  EXPECT_THROW(emf_spectrum(s.alpha, std::vector<double>(5, 0.0), pitch, 1.0), DomainError);
  Synthetic bad = s;
  bad.alpha[4] += 1e-3;
  EXPECT_THROW(emf_spectrum(bad.alpha, bad.psi, pitch, 1.0), DomainError);
  const Synthetic flat = synthetic(12, pitch, {{3, 1.0, 0.0}});
  EXPECT_THROW(thd(emf_spectrum(flat.alpha, flat.psi, pitch, 1.0)), DomainError);
}

TEST(Multiplier, ErrorAgainstConstant) {
  const HarmonicSet s = select_harmonics(Symmetry::Periodic, 2 * kPi, 2);
  Eigen::VectorXcd lam = Eigen::VectorXcd::Zero(s.size());
  lam(2) = 3.0;  // order 0
  EXPECT_NEAR(error_multiplier(s, lam, [](double) { return 3.0; }, 0.0, kPi / 2), 0.0, 1e-13);
  EXPECT_NEAR(error_multiplier(s, lam, [](double) { return 4.0; }, 0.0, kPi / 2), std::sqrt(kPi / 2), 1e-12);
  // lambda_1 = lambda_{-1} = 1/2: H = cos(theta)
  lam.setZero();
  lam(1) = lam(3) = 0.5;
  EXPECT_NEAR(error_multiplier(s, lam, [](double t) { return std::cos(t); }, 0.3, 2.0), 0.0, 1e-13);
  EXPECT_NEAR(multiplier_imag_ratio(s, lam, 0.0, kPi), 0.0, 1e-15);
  lam(1) = 0.0;
  lam(3) = 1.0;  // e^{-i theta}
  EXPECT_NEAR(multiplier_imag_ratio(s, lam, 0.0, kPi, 201), 1.0, 1e-12);
}

TEST(Field, PatchFieldAndBFromGradient) {
  MultiPatchDomain d;
  d.add_patch(iga::test::sector(1.0, 2.0, 0.0, kPi / 2));
  SpaceOptions o;
  o.degree = 2;
  o.subdivisions = 3;
  o.dirichlet = false;
  const DiscreteSpace s = build_space(d, o);
  // constant coefficients reproduce the constant function
  const SolutionField f(d, s, Eigen::VectorXd::Constant(s.num_dofs(), 2.5));
  const auto r = f.at_point(Vec2(1.2, 0.9));
  ASSERT_TRUE(r.found);
  EXPECT_NEAR(r.field.value, 2.5, 1e-14);
  EXPECT_LT(r.field.grad.norm(), 1e-12);
  EXPECT_FALSE(f.at_point(Vec2(0.1, 0.1)).found);
  FieldValue v;
  v.grad = Vec2(3.0, -1.0);
  EXPECT_EQ(v.b(), Vec2(-1.0, -3.0));
  const L2Result e = error_l2(f, [](const Vec2&) { return 2.0; }, 6);
  EXPECT_NEAR(e.error, 0.5 * std::sqrt(3 * kPi / 4), 1e-10);
  EXPECT_NEAR(e.relative(), 0.25, 1e-10);
}

TEST(Trace, AntiperiodicContinuation) {
  // sector 0..60 degrees with an airgap on its inner arc
  MultiPatchDomain d;
  d.add_patch(iga::test::sector(1.0, 2.0, 0.0, kPi / 3));
  d.set_tag(0, Side::North, BoundaryTag::Airgap);
  d.set_tag(0, Side::South, BoundaryTag::Dirichlet);
  d.set_tag(0, Side::West, BoundaryTag::AntiperiodicRight);
  d.set_tag(0, Side::East, BoundaryTag::AntiperiodicLeft);
  SpaceOptions o;
  o.degree = 2;
  o.subdivisions = 4;
  o.antiperiodic_rotation = kPi / 3;
  const DiscreteSpace s = build_space(d, o);
  const TraceSpace t = trace_on_airgap(s, d);
  EXPECT_NEAR(t.radius(), 1.0, 1e-15);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(s.num_dofs());
  for (auto& v : x) v = u(rng);
  const Eigen::VectorXd c = trace_coefficients(t, x);
  EXPECT_EQ(c.size(), t.size());
  // the identified end values are opposite
  EXPECT_NEAR(t.value(c, t.theta_begin()), -t.value(c, t.theta_end()), 1e-14);
  for (double th : {0.1, 0.5, 0.9}) {
    const double v = trace_value_wrapped(t, c, th, Symmetry::Antiperiodic, kPi / 3);
    EXPECT_NEAR(trace_value_wrapped(t, c, th + kPi / 3, Symmetry::Antiperiodic, kPi / 3), -v, 1e-14);
    EXPECT_NEAR(trace_value_wrapped(t, c, th + 2 * kPi / 3, Symmetry::Antiperiodic, kPi / 3), v, 1e-14);
    EXPECT_NEAR(trace_value_wrapped(t, c, th - kPi / 3, Symmetry::Antiperiodic, kPi / 3), -v, 1e-14);
    EXPECT_NEAR(trace_value_wrapped(t, c, th + kPi / 3, Symmetry::Periodic, kPi / 3), v, 1e-14);
  }
  // jump against itself vanishes, against its negative doubles the norm
  EXPECT_NEAR(error_jump(t, x, t, x, 0.0, Symmetry::Antiperiodic, kPi / 3, 4), 0.0, 1e-14);
  const double n2 = error_jump(t, x, t, Eigen::VectorXd::Zero(x.size()), 0.0, Symmetry::Antiperiodic, kPi / 3, 4);
  EXPECT_NEAR(error_jump(t, x, t, -x, 0.0, Symmetry::Antiperiodic, kPi / 3, 4), 2 * n2, 1e-12);
  // a rotation by one pitch flips the sign
  EXPECT_NEAR(error_jump(t, x, t, -x, kPi / 3, Symmetry::Antiperiodic, kPi / 3, 4), 0.0, 1e-12);
}

TEST(FluxLinkage, UnitPotentialGivesTurnCounts) {
  const MachineModel m = build_pmsm_pole(MachineParams{});
  SpaceOptions o;
  o.degree = 2;
  o.subdivisions = 1;
  o.antiperiodic_rotation = m.domains.antiperiodic_rotation;
  const DiscreteSpace s = build_space(m.domains.st, o);
  const Eigen::MatrixXd op = flux_linkage_operator(m.domains.st, s, m.coils, m.params.n_turns,
                                                   m.params.axial_length, m.params.poles, QuadratureRule(4));
  ASSERT_EQ(op.rows(), 3);
  // A = 1 on every coil side: psi = poles * l_z * N_w * sum(polarity)
  const Eigen::Vector3d psi = op * Eigen::VectorXd::Ones(s.num_dofs());
  const double unit = m.params.poles * m.params.axial_length * m.params.n_turns;
  EXPECT_NEAR(psi(0), 4 * unit, 1e-10 * unit);
  EXPECT_NEAR(psi(1), 2 * unit, 1e-10 * unit);
  EXPECT_NEAR(psi(2), -4 * unit, 1e-10 * unit);
}
