#include "iga/mortar.hpp"

#include "iga/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace iga {

namespace {

const cplx kI(0.0, 1.0);

bool admissible(Symmetry s, double pitch, int l) {
  const cplx phase = std::exp(-kI * (l * pitch));
  return std::abs(phase - (s == Symmetry::Periodic ? 1.0 : -1.0)) < 1e-9;
}

double max_abs(const CSpMat& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (CSpMat::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

void finish_diagnostics(const SaddleSystem& sys, CoupledSolution& s) {
  Eigen::VectorXd u(sys.n_primal());
  u << s.u_rt, s.u_st;
  const Eigen::VectorXcd bl = sys.b * s.lambda;
  const Eigen::VectorXd r = sys.k * u + bl.real() - sys.j;
  const double jn = sys.j.norm();
  s.residual = jn > 0 ? r.norm() / jn : r.norm();
  const Eigen::VectorXcd c = sys.b.adjoint() * u.cast<cplx>();
  const double scale = std::sqrt(static_cast<double>(sys.b.cols())) * max_abs(sys.b) * u.norm();
  s.constraint = scale > 0 ? c.norm() / scale : c.norm();
}

}  // namespace

const char* symmetry_name(Symmetry s) { return s == Symmetry::Periodic ? "periodic" : "antiperiodic"; }

Symmetry symmetry_from_name(const std::string& s) {
  if (s == "periodic") return Symmetry::Periodic;
  if (s == "antiperiodic") return Symmetry::Antiperiodic;
  throw DomainError("unknown symmetry '" + s + "'");
}

HarmonicSet select_harmonics(Symmetry symmetry, double pitch, int max_order) {
  if (!(pitch > 0)) throw DomainError("harmonic selection needs a positive pitch");
  HarmonicSet h;
  h.symmetry = symmetry;
  h.pitch = pitch;
  for (int l = -max_order; l <= max_order; ++l) {
    if (admissible(symmetry, pitch, l)) h.orders.push_back(l);
  }
  if (h.orders.empty()) {
    std::ostringstream os;
    os << "no " << symmetry_name(symmetry) << " harmonic with order <= " << max_order
       << " for pitch " << pitch << "; increase max_order";
    throw DomainError(os.str());
  }
  return h;
}

HarmonicSet first_harmonics(Symmetry symmetry, double pitch, int count) {
  if (count < 1) throw DomainError("harmonic count must be positive");
  int found = 0, l = 0;
  for (; found < count; ++l) {
    if (l > 100000) throw DomainError("no admissible harmonic orders for this pitch");
    if (admissible(symmetry, pitch, l)) ++found;
  }
  return select_harmonics(symmetry, pitch, l - 1);
}

CSpMat assemble_coupling(const TraceSpace& trace, int n_dofs, const HarmonicSet& set, CouplingSide side, int q) {
  const double sgn = side == CouplingSide::Rotor ? 1.0 : -1.0;
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(trace.size(), set.size());
  for (const TracePoint& tp : trace.quadrature(q)) {
    for (int c = 0; c < set.size(); ++c) {
      const cplx e = std::exp(-kI * (set.orders[c] * tp.theta)) * (sgn * tp.weight);
      for (std::size_t k = 0; k < tp.dof.size(); ++k) dense(tp.dof[k], c) += e * tp.value[k];
    }
  }
  std::vector<Eigen::Triplet<cplx>> t;
  const auto glob = trace.global_dofs();
  for (int i = 0; i < trace.size(); ++i) {
    if (glob[i] >= n_dofs) throw MismatchError("trace DoF outside the coupled space");
    for (int c = 0; c < set.size(); ++c) t.emplace_back(glob[i], c, dense(i, c));
  }
  CSpMat g(n_dofs, set.size());
  g.setFromTriplets(t.begin(), t.end());
  g.makeCompressed();
  return g;
}

Eigen::VectorXcd rotation_matrix(const HarmonicSet& set, double alpha) {
  Eigen::VectorXcd r(set.size());
  for (int c = 0; c < set.size(); ++c) r[c] = std::exp(kI * (set.orders[c] * alpha));
  return r;
}

Eigen::MatrixXcd harmonic_mass(const HarmonicSet& set, double theta0, double theta1) {
  const int n = set.size();
  Eigen::MatrixXcd m(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int d = set.orders[a] - set.orders[b];
      if (d == 0) {
        m(a, b) = theta1 - theta0;
      } else {
        m(a, b) = (std::exp(kI * (d * theta1)) - std::exp(kI * (d * theta0))) / (kI * static_cast<double>(d));
      }
    }
  }
  return m;
}

CSpMat SaddleSystem::matrix() const {
  const int n = n_primal(), m = set.size();
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < this->k.outerSize(); ++k) {
    for (SpMat::InnerIterator it(this->k, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < b.outerSize(); ++k) {
    for (CSpMat::InnerIterator it(b, k); it; ++it) {
      t.emplace_back(it.row(), n + it.col(), it.value());
      t.emplace_back(n + it.col(), it.row(), std::conj(it.value()));
    }
  }
  CSpMat s(n + m, n + m);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SaddleSystem assemble_saddle(const SpMat& k_rt, const SpMat& k_st, const CSpMat& g_rt, const CSpMat& g_st,
                             const HarmonicSet& set, double alpha, const Eigen::VectorXd& j_rt,
                             const Eigen::VectorXd& j_st) {
  const int nr = static_cast<int>(k_rt.rows()), ns = static_cast<int>(k_st.rows());
  if (k_rt.cols() != nr || k_st.cols() != ns || g_rt.rows() != nr || g_st.rows() != ns ||
      g_rt.cols() != set.size() || g_st.cols() != set.size() || j_rt.size() != nr || j_st.size() != ns) {
    throw MismatchError("saddle assembly: block dimensions do not match");
  }
  SaddleSystem s;
  s.n_rt = nr;
  s.n_st = ns;
  s.set = set;
  s.alpha = alpha;
  std::vector<Eigen::Triplet<double>> tk;
  for (int k = 0; k < k_rt.outerSize(); ++k) {
    for (SpMat::InnerIterator it(k_rt, k); it; ++it) tk.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < k_st.outerSize(); ++k) {
    for (SpMat::InnerIterator it(k_st, k); it; ++it) tk.emplace_back(nr + it.row(), nr + it.col(), it.value());
  }
  s.k.resize(nr + ns, nr + ns);
  s.k.setFromTriplets(tk.begin(), tk.end());
  const Eigen::VectorXcd r = rotation_matrix(set, alpha);
  std::vector<Eigen::Triplet<cplx>> tb;
  for (int k = 0; k < g_rt.outerSize(); ++k) {
    for (CSpMat::InnerIterator it(g_rt, k); it; ++it) tb.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < g_st.outerSize(); ++k) {
    for (CSpMat::InnerIterator it(g_st, k); it; ++it) tb.emplace_back(nr + it.row(), it.col(), it.value() * r[it.col()]);
  }
  s.b.resize(nr + ns, set.size());
  s.b.setFromTriplets(tb.begin(), tb.end());
  s.j.resize(nr + ns);
  s.j << j_rt, j_st;
  return s;
}

namespace {

void require_double_sided(const HarmonicSet& set) {
  for (int l : set.orders) {
    if (std::find(set.orders.begin(), set.orders.end(), -l) == set.orders.end()) {
      throw DomainError("harmonic set is not double-sided (missing " + std::to_string(-l) + ")");
    }
  }
}

int column_of(const HarmonicSet& set, int l) {
  return static_cast<int>(std::find(set.orders.begin(), set.orders.end(), l) - set.orders.begin());
}

}  // namespace

Eigen::VectorXd multipliers_to_real(const HarmonicSet& set, const Eigen::VectorXcd& lambda) {
  require_double_sided(set);
  Eigen::VectorXd ab(set.size());
  int r = 0;
  for (int l : set.orders) {
    if (l < 0) continue;
    const cplx v = lambda[column_of(set, l)];
    if (l == 0) {
      ab[r++] = v.real();
    } else {
      ab[r++] = 2.0 * v.real();
      ab[r++] = 2.0 * v.imag();
    }
  }
  return ab;
}

Eigen::VectorXcd multipliers_from_real(const HarmonicSet& set, const Eigen::VectorXd& ab) {
  require_double_sided(set);
  Eigen::VectorXcd lambda(set.size());
  int r = 0;
  for (int l : set.orders) {
    if (l < 0) continue;
    if (l == 0) {
      lambda[column_of(set, 0)] = ab[r++];
    } else {
      const double a = ab[r++], b = ab[r++];
      lambda[column_of(set, l)] = cplx(a, b) / 2.0;
      lambda[column_of(set, -l)] = cplx(a, -b) / 2.0;
    }
  }
  return lambda;
}

RealSaddle realify(const SaddleSystem& sys) {
  require_double_sided(sys.set);
  const int n = sys.n_primal(), m = sys.set.size();
  std::vector<Eigen::Triplet<double>> tb;
  int r = 0;
  for (int l : sys.set.orders) {
    if (l < 0) continue;
    const int c = column_of(sys.set, l);
    for (CSpMat::InnerIterator it(sys.b, c); it; ++it) {
      tb.emplace_back(it.row(), r, it.value().real());
      if (l > 0) tb.emplace_back(it.row(), r + 1, -it.value().imag());
    }
    r += l == 0 ? 1 : 2;
  }
  RealSaddle rs;
  rs.b_r.resize(n, m);
  rs.b_r.setFromTriplets(tb.begin(), tb.end());
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < sys.k.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sys.k, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < rs.b_r.outerSize(); ++k) {
    for (SpMat::InnerIterator it(rs.b_r, k); it; ++it) {
      t.emplace_back(it.row(), n + it.col(), it.value());
      t.emplace_back(n + it.col(), it.row(), it.value());
    }
  }
  rs.a.resize(n + m, n + m);
  rs.a.setFromTriplets(t.begin(), t.end());
  rs.rhs = Eigen::VectorXd::Zero(n + m);
  rs.rhs.head(n) = sys.j;
  return rs;
}

CoupledSolution solve_coupled(const SaddleSystem& sys) {
  const RealSaddle rs = realify(sys);
  Eigen::VectorXd x;
  try {
    x = factor_solve_sym_indefinite(rs.a, rs.rhs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + "; try fewer harmonics or a finer mesh");
  }
  CoupledSolution s;
  s.u_rt = x.head(sys.n_rt);
  s.u_st = x.segment(sys.n_rt, sys.n_st);
  s.lambda = multipliers_from_real(sys.set, x.tail(sys.set.size()));
  finish_diagnostics(sys, s);
  return s;
}

CoupledSolution solve_coupled_complex(const SaddleSystem& sys) {
  const int n = sys.n_primal();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + sys.set.size());
  rhs.head(n) = sys.j.cast<cplx>();
  Eigen::VectorXcd x;
  try {
    x = factor_solve_sym_indefinite(sys.matrix(), rhs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + "; try fewer harmonics or a finer mesh");
  }
  CoupledSolution s;
  s.u_rt = x.head(sys.n_rt).real();
  s.u_st = x.segment(sys.n_rt, sys.n_st).real();
  s.lambda = x.tail(sys.set.size());
  finish_diagnostics(sys, s);
  return s;
}

cplx multiplier_field(const HarmonicSet& set, const Eigen::VectorXcd& lambda, double theta) {
  cplx v = 0.0;
  for (int c = 0; c < set.size(); ++c) v += lambda[c] * std::exp(-kI * (set.orders[c] * theta));
  return v;
}

CoupledSweep::CoupledSweep(const SpMat& k_rt, const SpMat& k_st, const CSpMat& g_rt, const CSpMat& g_st,
                           const HarmonicSet& set, const Eigen::VectorXd& j_rt, const Eigen::VectorXd& j_st)
    : set_(set), g_rt_(g_rt), g_st_(g_st) {
  const SpdSolver srt(k_rt), sst(k_st);
  x_rt_ = srt.solve(Eigen::MatrixXcd(g_rt));
  x_st_ = sst.solve(Eigen::MatrixXcd(g_st));
  y_rt_ = srt.solve(j_rt);
  y_st_ = sst.solve(j_st);
  s_rt_ = g_rt.adjoint() * x_rt_;
  s_st_ = g_st.adjoint() * x_st_;
  h_rt_ = g_rt.adjoint() * y_rt_.cast<cplx>();
  h_st_ = g_st.adjoint() * y_st_.cast<cplx>();
}

CoupledSolution CoupledSweep::solve(double alpha) const {
  const Eigen::VectorXcd r = rotation_matrix(set_, alpha);
  Eigen::MatrixXcd s = s_rt_ + r.conjugate().asDiagonal() * s_st_ * r.asDiagonal();
  s = 0.5 * (s + s.adjoint()).eval();
  const Eigen::VectorXcd h = h_rt_ + r.conjugate().asDiagonal() * h_st_;
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(s);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
    throw NumericalError("coupled sweep: singular interface Schur complement; try fewer harmonics");
  }
  CoupledSolution sol;
  sol.lambda = ldlt.solve(h);
  sol.u_rt = y_rt_ - (x_rt_ * sol.lambda).real();
  sol.u_st = y_st_ - (x_st_ * (r.asDiagonal() * sol.lambda)).real();
  const Eigen::VectorXcd c = g_rt_.adjoint() * sol.u_rt.cast<cplx>() +
                             r.conjugate().asDiagonal() * (g_st_.adjoint() * sol.u_st.cast<cplx>());
  const double un = std::sqrt(sol.u_rt.squaredNorm() + sol.u_st.squaredNorm());
  double gmax = 0.0;
  for (const CSpMat* g : {&g_rt_, &g_st_}) gmax = std::max(gmax, max_abs(*g));
  const double scale = std::sqrt(static_cast<double>(set_.size())) * gmax * un;
  sol.constraint = scale > 0 ? c.norm() / scale : c.norm();
  return sol;
}

InfSupResult infsup_constant(const SpdSolver& k, const CSpMat& b, const Eigen::MatrixXcd& m) {
  if (b.rows() != k.size() || m.rows() != b.cols()) throw MismatchError("inf-sup: dimension mismatch");
  const Eigen::MatrixXcd x = k.solve(Eigen::MatrixXcd(b));
  Eigen::MatrixXcd a = b.adjoint() * x;
  a = 0.5 * (a + a.adjoint()).eval();
  InfSupResult r;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(m, Eigen::EigenvaluesOnly);
  const double mmin = em.eigenvalues().minCoeff(), mmax = em.eigenvalues().maxCoeff();
  r.mass_condition = mmin > 0 ? mmax / mmin : std::numeric_limits<double>::infinity();
  if (!r.resolved()) {
    r.beta = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const GenEigResult ev = gen_eig_sym(a, m);
  r.sigma = ev.values.cwiseMax(0.0).cwiseSqrt();
  r.beta = r.sigma.minCoeff();
  return r;
}

}  // namespace iga
