#include "iga/kernels.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace k = iga::kernels;

namespace {

struct Data {
  std::vector<double> n, gx, gy, c;
};

Data make_data(int nq, int nb, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data d;
  d.n.resize(nq * nb);
  d.gx.resize(nq * nb);
  d.gy.resize(nq * nb);
  d.c.resize(nq);
  for (auto* v : {&d.n, &d.gx, &d.gy, &d.c}) {
    for (double& x : *v) x = u(rng);
  }
  return d;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Kernels, ScalarMatchesNaiveSums) {
  const int nq = 9, nb = 9;
  const Data d = make_data(nq, nb, 11);
  std::vector<double> ke(nb * nb, 0.0), me(nb * nb, 0.0), fe(nb, 0.0);
  k::scalar::stiffness(d.gx.data(), d.gy.data(), d.c.data(), nq, nb, ke.data());
  k::scalar::mass(d.n.data(), d.c.data(), nq, nb, me.data());
  k::scalar::load(d.n.data(), d.c.data(), nq, nb, fe.data());
  for (int a = 0; a < nb; ++a) {
    double f = 0.0;
    for (int q = 0; q < nq; ++q) f += d.c[q] * d.n[q * nb + a];
    EXPECT_NEAR(fe[a], f, 1e-14);
    for (int b = 0; b < nb; ++b) {
      double s = 0.0, m = 0.0;
      for (int q = 0; q < nq; ++q) {
        s += d.c[q] * (d.gx[q * nb + a] * d.gx[q * nb + b] + d.gy[q * nb + a] * d.gy[q * nb + b]);
        m += d.c[q] * d.n[q * nb + a] * d.n[q * nb + b];
      }
      EXPECT_NEAR(ke[a * nb + b], s, 1e-14);
      EXPECT_NEAR(me[a * nb + b], m, 1e-14);
    }
  }
}

TEST(Kernels, AccumulateIntoOutput) {
  const Data d = make_data(4, 4, 3);
  std::vector<double> once(16, 0.0), twice(16, 0.0);
  k::scalar::mass(d.n.data(), d.c.data(), 4, 4, once.data());
  k::scalar::mass(d.n.data(), d.c.data(), 4, 4, twice.data());
  k::scalar::mass(d.n.data(), d.c.data(), 4, 4, twice.data());
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(twice[i], 2 * once[i], 1e-15);
}

#ifdef IGA_WITH_AVX2
TEST(Kernels, Avx2MatchesScalar) {
  if (k::detected_isa() != k::Isa::Avx2) GTEST_SKIP() << "CPU without AVX2";
  // sizes cover the vector width, remainders and every degree in use
  for (int nb : {1, 3, 4, 5, 9, 16, 17, 25}) {
    for (int nq : {1, 4, 9, 16}) {
      const Data d = make_data(nq, nb, 100 * nb + nq);
      std::vector<double> ks(nb * nb, 0.5), kv(nb * nb, 0.5), ms(nb * nb), mv(nb * nb), fs(nb), fv(nb);
      k::scalar::stiffness(d.gx.data(), d.gy.data(), d.c.data(), nq, nb, ks.data());
      k::avx2::stiffness(d.gx.data(), d.gy.data(), d.c.data(), nq, nb, kv.data());
      k::scalar::mass(d.n.data(), d.c.data(), nq, nb, ms.data());
      k::avx2::mass(d.n.data(), d.c.data(), nq, nb, mv.data());
      k::scalar::load(d.n.data(), d.c.data(), nq, nb, fs.data());
      k::avx2::load(d.n.data(), d.c.data(), nq, nb, fv.data());
      EXPECT_LT(max_diff(ks, kv), 1e-13) << "nb=" << nb << " nq=" << nq;
      EXPECT_LT(max_diff(ms, mv), 1e-13) << "nb=" << nb << " nq=" << nq;
      EXPECT_LT(max_diff(fs, fv), 1e-13) << "nb=" << nb << " nq=" << nq;
    }
  }
}
#endif

TEST(Kernels, DispatchCanBeForced) {
  const k::Isa before = k::active_isa();
  EXPECT_TRUE(k::set_isa(k::Isa::Scalar));
  EXPECT_EQ(k::active_isa(), k::Isa::Scalar);
  const Data d = make_data(9, 9, 5);
  std::vector<double> a(81, 0.0), b(81, 0.0);
  k::stiffness(d.gx.data(), d.gy.data(), d.c.data(), 9, 9, a.data());
  k::set_isa(k::detected_isa());
  k::stiffness(d.gx.data(), d.gy.data(), d.c.data(), 9, 9, b.data());
  EXPECT_LT(max_diff(a, b), 1e-13);
  EXPECT_EQ(k::isa_name(k::Isa::Scalar), "scalar");
  k::set_isa(before);
}
