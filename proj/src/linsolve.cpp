#include "iga/linsolve.hpp"

#include "iga/errors.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace iga {

namespace {

constexpr double kResidualBound = 1e-10;
constexpr double kPivotFloor = 1e-13;

template <class Mat>
double defect(const Mat& a) {
  using Sc = typename Mat::Scalar;
  const Mat at = a.adjoint();
  const Mat d = a - at;
  double md = 0.0, ma = 0.0;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (typename Mat::InnerIterator it(d, k); it; ++it) md = std::max(md, std::abs(Sc(it.value())));
  }
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Mat::InnerIterator it(a, k); it; ++it) ma = std::max(ma, std::abs(Sc(it.value())));
  }
  return ma > 0 ? md / ma : md;
}

template <class V>
void check_residual(double r, const char* what) {
  if (!(r < kResidualBound)) {
    std::ostringstream os;
    os << what << ": relative residual " << r << " exceeds " << kResidualBound;
    throw NumericalError(os.str());
  }
}

template <class Mat, class Vec>
double rel_residual(const Mat& a, const Vec& x, const Vec& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0 ? nr / nb : nr;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lu_solve(const Eigen::SparseMatrix<Scalar>& a,
                                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                                                  SolveInfo* info) {
  using SMat = Eigen::SparseMatrix<Scalar>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw MismatchError("indefinite solve: dimension mismatch");
  Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename SMat::InnerIterator it(a, k); it; ++it) {
      rowmax[it.row()] = std::max(rowmax[it.row()], std::abs(it.value()));
    }
  }
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rowmax[i] == 0.0) throw NumericalError("indefinite solve: matrix has a zero row");
    d[i] = 1.0 / std::sqrt(rowmax[i]);
  }
  SMat s = d.asDiagonal() * a * d.asDiagonal();
  s.makeCompressed();
  Eigen::SparseLU<SMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(s);
  if (lu.info() != Eigen::Success) throw NumericalError("indefinite solve: singular matrix (" + lu.lastErrorMessage() + ")");
  double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
  const auto& lstore = lu.matrixL().m_mapL;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (typename std::decay_t<decltype(lstore)>::InnerIterator it(lstore, j); it; ++it) {
      if (it.index() == j) {
        umin = std::min(umin, std::abs(it.value()));
        umax = std::max(umax, std::abs(it.value()));
        break;
      }
    }
  }
  const double ratio = umax > 0 ? umin / umax : 0.0;
  if (ratio < kPivotFloor) {
    std::ostringstream os;
    os << "indefinite solve: numerically singular (pivot ratio " << ratio << ")";
    throw NumericalError(os.str());
  }
  const Vec y = lu.solve(Vec(d.cast<Scalar>().asDiagonal() * b));
  const Vec x = d.cast<Scalar>().asDiagonal() * y;
  if (!x.allFinite()) throw NumericalError("indefinite solve: non-finite solution");
  const double r = rel_residual(a, x, b);
  if (info) *info = SolveInfo{r, ratio};
  check_residual<Vec>(r, "indefinite solve");
  return x;
}

}  // namespace

double symmetry_defect(const SpMat& a) { return defect(a); }
double symmetry_defect(const CSpMat& a) { return defect(a); }

SpdSolver::SpdSolver(const SpMat& a) { factor(a); }

void SpdSolver::factor(const SpMat& a) {
  if (a.rows() != a.cols()) throw MismatchError("SPD factorization needs a square matrix");
  a_ = a;
  n_ = static_cast<int>(a.rows());
  ldlt_.compute(a_);
  if (ldlt_.info() != Eigen::Success) throw NumericalError("SPD factorization failed");
  const Eigen::VectorXd dd = ldlt_.vectorD();
  if (n_ == 0) return;
  const double dmax = dd.maxCoeff();
  const double dmin = dd.minCoeff();
  pivot_ratio_ = dmax > 0 ? dmin / dmax : 0.0;
  if (!(dmax > 0) || !(pivot_ratio_ > kPivotFloor)) {
    std::ostringstream os;
    os << "SPD factorization: non-positive or vanishing pivot (ratio " << pivot_ratio_
       << "); is the system missing a Dirichlet constraint?";
    throw NumericalError(os.str());
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw MismatchError("SPD solve: dimension mismatch");
  Eigen::VectorXd x = ldlt_.solve(b);
  check_residual<Eigen::VectorXd>(rel_residual(a_, x, b), "SPD solve");
  return x;
}

Eigen::MatrixXd SpdSolver::solve(const Eigen::MatrixXd& b) const {
  if (b.rows() != n_) throw MismatchError("SPD solve: dimension mismatch");
  Eigen::MatrixXd x = ldlt_.solve(b);
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    check_residual<Eigen::VectorXd>(rel_residual(a_, Eigen::VectorXd(x.col(c)), Eigen::VectorXd(b.col(c))), "SPD solve");
  }
  return x;
}

Eigen::VectorXcd SpdSolver::solve(const Eigen::VectorXcd& b) const {
  Eigen::MatrixXd ri(b.size(), 2);
  ri.col(0) = b.real();
  ri.col(1) = b.imag();
  const Eigen::MatrixXd x = solve(ri);
  return x.col(0).cast<cplx>() + cplx(0, 1) * x.col(1).cast<cplx>();
}

Eigen::MatrixXcd SpdSolver::solve(const Eigen::MatrixXcd& b) const {
  const Eigen::Index m = b.cols();
  Eigen::MatrixXd ri(b.rows(), 2 * m);
  ri.leftCols(m) = b.real();
  ri.rightCols(m) = b.imag();
  const Eigen::MatrixXd x = solve(ri);
  return x.leftCols(m).cast<cplx>() + cplx(0, 1) * x.rightCols(m).cast<cplx>();
}

Eigen::VectorXd factor_solve_spd(const SpMat& a, const Eigen::VectorXd& b) { return SpdSolver(a).solve(b); }

Eigen::VectorXd factor_solve_sym_indefinite(const SpMat& a, const Eigen::VectorXd& b, SolveInfo* info) {
  return lu_solve<double>(a, b, info);
}

Eigen::VectorXcd factor_solve_sym_indefinite(const CSpMat& a, const Eigen::VectorXcd& b, SolveInfo* info) {
  return lu_solve<cplx>(a, b, info);
}

GenEigResult gen_eig_sym(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& m, bool vectors) {
  if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows()) {
    throw MismatchError("generalized eigenproblem: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("generalized eigenproblem: M is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigenproblem did not converge");
  GenEigResult r;
  r.values = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    r.residual += (a * v.col(k) - r.values[k] * (m * v.col(k))).norm();
  }
  if (vectors) r.vectors = v;
  return r;
}

namespace {

template <class Mat, class Writer>
void write_any(const std::string& path, const Mat& a, Writer w) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << std::setprecision(17);
  f << a.rows() << " " << a.cols() << " " << a.nonZeros() << "\n";
  for (int k = 0; k < a.outerSize(); ++k) {
    for (typename Mat::InnerIterator it(a, k); it; ++it) {
      f << it.row() << " " << it.col() << " ";
      w(f, it.value());
      f << "\n";
    }
  }
}

}  // namespace

void write_triplets(const std::string& path, const SpMat& a) {
  write_any(path, a, [](std::ostream& f, double v) { f << v; });
}

void write_triplets(const std::string& path, const CSpMat& a) {
  write_any(path, a, [](std::ostream& f, cplx v) { f << v.real() << " " << v.imag(); });
}

SpMat read_triplets(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read " + path);
  long rows = 0, cols = 0, nnz = 0;
  if (!(f >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) throw DomainError("bad triplet header in " + path);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double v;
    if (!(f >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols) throw DomainError("bad triplet entry in " + path);
    t.emplace_back(i, j, v);
  }
  SpMat a(rows, cols);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace iga
