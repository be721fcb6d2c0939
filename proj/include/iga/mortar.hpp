#pragma once

// Harmonic (Fourier) mortar coupling of a rotor and a stator domain across a
// circular interface.
//
// Unknowns are ordered U = [u_rt; u_st]. The coupling block is
//   B(alpha) = [G_rt; G_st R(alpha)]          (N_U x N_Gamma, complex)
// with g_rt[i,l] = +int e^{-i l theta'} w_i dtheta',
//      g_st[i,l] = -int e^{-i l theta}  w_i dtheta,
//      R = diag(e^{+i l alpha}),  theta' = theta - alpha (rotor frame).
// The saddle system is
//   [ K    B ] [U     ]   [J]
//   [ B^H  0 ] [lambda] = [0],
// so the constraint reads G_rt^H u_rt + R^H G_st^H u_st = 0 and the matrix is
// hermitian. The multiplier field H(theta') = sum_l lambda_l e^{-i l theta'}
// is the flux density entering the rotor weak form per unit angle.

#include "iga/linsolve.hpp"
#include "iga/trace.hpp"

#include <vector>

namespace iga {

enum class Symmetry { Periodic, Antiperiodic };

const char* symmetry_name(Symmetry s);
Symmetry symmetry_from_name(const std::string& s);

struct HarmonicSet {
  std::vector<int> orders;  // ascending, double-sided
  Symmetry symmetry = Symmetry::Periodic;
  double pitch = 0.0;       // period (periodic) or half period (antiperiodic)

  int size() const { return static_cast<int>(orders.size()); }
  int max_order() const { return orders.empty() ? 0 : orders.back(); }
};

/// All orders |l| <= max_order with e^{-i l pitch} = +1 (periodic) or -1
/// (anti-periodic). Throws DomainError when none qualifies.
HarmonicSet select_harmonics(Symmetry symmetry, double pitch, int max_order);

/// Returns the first `count` nonnegative admissible orders as a double-sided
/// set (convenience for sweeps over N_Gamma).
HarmonicSet first_harmonics(Symmetry symmetry, double pitch, int count);

enum class CouplingSide { Rotor, Stator };

/// Coupling matrix with one row per free DoF of the side's space (rows of DoFs
/// not on the interface are empty). Quadrature: q points per trace element.
CSpMat assemble_coupling(const TraceSpace& trace, int n_dofs, const HarmonicSet& set, CouplingSide side, int q);

/// Diagonal of R(alpha).
Eigen::VectorXcd rotation_matrix(const HarmonicSet& set, double alpha);

/// m[l,k] = int e^{-i k theta} e^{i l theta} dtheta over [theta0, theta1].
Eigen::MatrixXcd harmonic_mass(const HarmonicSet& set, double theta0, double theta1);

struct SaddleSystem {
  SpMat k;             // diag(K_rt, K_st)
  CSpMat b;            // [G_rt; G_st R]
  Eigen::VectorXd j;   // [j_rt; j_st]
  int n_rt = 0;
  int n_st = 0;
  HarmonicSet set;
  double alpha = 0.0;

  int n_primal() const { return n_rt + n_st; }
  /// Full complex matrix [K, B; B^H, 0].
  CSpMat matrix() const;
};

SaddleSystem assemble_saddle(const SpMat& k_rt, const SpMat& k_st, const CSpMat& g_rt, const CSpMat& g_st,
                             const HarmonicSet& set, double alpha, const Eigen::VectorXd& j_rt,
                             const Eigen::VectorXd& j_st);

/// Real trigonometric multiplier basis. For l > 0 the pair (l, -l) becomes
/// (a_l, b_l) with lambda_l = (a_l + i b_l)/2 and lambda_{-l} = (a_l - i b_l)/2;
/// l = 0 keeps lambda_0 = a_0. Real multipliers are ordered by ascending
/// l >= 0, with a_l before b_l.
struct RealSaddle {
  SpMat a;              // [K, B_r; B_r^T, 0], real symmetric
  Eigen::VectorXd rhs;
  SpMat b_r;
};

RealSaddle realify(const SaddleSystem& sys);
Eigen::VectorXd multipliers_to_real(const HarmonicSet& set, const Eigen::VectorXcd& lambda);
Eigen::VectorXcd multipliers_from_real(const HarmonicSet& set, const Eigen::VectorXd& ab);

struct CoupledSolution {
  Eigen::VectorXd u_rt;
  Eigen::VectorXd u_st;
  Eigen::VectorXcd lambda;      // ordered like set.orders
  double residual = 0.0;        // primal block, relative to ||J||
  double constraint = 0.0;      // ||B^H U|| / (||B|| ||U||)
};

/// Direct solve of the realified system.
CoupledSolution solve_coupled(const SaddleSystem& sys);
/// Direct solve of the complex hermitian system (cross-check path).
CoupledSolution solve_coupled_complex(const SaddleSystem& sys);

/// Multiplier field sum_l lambda_l e^{-i l theta}.
cplx multiplier_field(const HarmonicSet& set, const Eigen::VectorXcd& lambda, double theta);

/// Rotor-position sweeps with fixed K, G: both stiffness blocks are factored
/// once and each angle costs one dense N_Gamma x N_Gamma solve.
class CoupledSweep {
 public:
  CoupledSweep(const SpMat& k_rt, const SpMat& k_st, const CSpMat& g_rt, const CSpMat& g_st, const HarmonicSet& set,
               const Eigen::VectorXd& j_rt, const Eigen::VectorXd& j_st);

  CoupledSolution solve(double alpha) const;
  const HarmonicSet& set() const { return set_; }

 private:
  HarmonicSet set_;
  CSpMat g_rt_, g_st_;
  Eigen::MatrixXcd x_rt_, x_st_;      // K^{-1} G
  Eigen::VectorXd y_rt_, y_st_;       // K^{-1} j
  Eigen::MatrixXcd s_rt_, s_st_;      // G^H K^{-1} G
  Eigen::VectorXcd h_rt_, h_st_;      // G^H K^{-1} j
};

struct InfSupResult {
  double beta = 0.0;
  Eigen::VectorXd sigma;        // ascending
  double mass_condition = 0.0;  // of M; beyond ~1e14 beta is not resolved in double precision
  bool resolved() const { return mass_condition < 1e14; }
};

/// beta = min sqrt(eig(B^H K^{-1} B, M)); B^H K^{-1} B is formed from one SPD
/// solve per column of B. When M is numerically singular (many harmonics on a
/// short arc) beta is NaN and resolved() is false.
InfSupResult infsup_constant(const SpdSolver& k, const CSpMat& b, const Eigen::MatrixXcd& m);

}  // namespace iga
