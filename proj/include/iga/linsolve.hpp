#pragma once

// Sparse direct solvers and the dense generalized hermitian eigenproblem.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <complex>
#include <string>

namespace iga {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using CSpMat = Eigen::SparseMatrix<cplx>;

/// Max |A - A^H| entry relative to max |A|.
double symmetry_defect(const SpMat& a);
double symmetry_defect(const CSpMat& a);

/// Sparse LDL^T with AMD ordering, checked for positive pivots. The factor is
/// reused for any number of right-hand sides.
class SpdSolver {
 public:
  SpdSolver() = default;
  explicit SpdSolver(const SpMat& a);
  void factor(const SpMat& a);

  int size() const { return n_; }
  /// Solves and re-checks the relative residual (< 1e-10 or NumericalError).
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const;
  /// Smallest/largest pivot ratio of the factorization.
  double pivot_ratio() const { return pivot_ratio_; }

 private:
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  SpMat a_;
  int n_ = 0;
  double pivot_ratio_ = 0.0;
};

Eigen::VectorXd factor_solve_spd(const SpMat& a, const Eigen::VectorXd& b);

struct SolveInfo {
  double residual = 0.0;     // ||Ax - b|| / ||b||
  double pivot_ratio = 0.0;  // min |u_ii| / max |u_ii| after equilibration
};

/// Symmetric (or hermitian) indefinite nonsingular systems. Uses symmetric
/// diagonal equilibration and a COLAMD-ordered sparse LU; near-zero pivots,
/// non-finite output and residuals above 1e-10 raise NumericalError.
Eigen::VectorXd factor_solve_sym_indefinite(const SpMat& a, const Eigen::VectorXd& b, SolveInfo* info = nullptr);
Eigen::VectorXcd factor_solve_sym_indefinite(const CSpMat& a, const Eigen::VectorXcd& b, SolveInfo* info = nullptr);

struct GenEigResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // M-orthonormal columns (empty unless requested)
  double residual = 0.0;     // sum of column residual norms |A x - l M x|
};

/// A x = l M x for hermitian A and hermitian positive definite M.
GenEigResult gen_eig_sym(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& m, bool vectors = false);

/// Triplet text format: first line "rows cols nnz", then "row col value" (or
/// "row col re im" for complex) per line, zero-based.
void write_triplets(const std::string& path, const SpMat& a);
void write_triplets(const std::string& path, const CSpMat& a);
SpMat read_triplets(const std::string& path);

}  // namespace iga
