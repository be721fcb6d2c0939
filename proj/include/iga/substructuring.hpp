#pragma once

// Dirichlet-Neumann substructuring across the air-gap interface: the rotor
// takes Dirichlet data on its interface trace, its Neumann residual drives a
// stator solve, and the stator trace (projected back onto the rotor trace
// space) updates the Dirichlet data with relaxation.

#include "iga/errors.hpp"
#include "iga/mortar.hpp"
#include "iga/postproc.hpp"

#include <string>
#include <vector>

namespace iga {

struct DNSubdomain {
  SpMat k;
  Eigen::VectorXd j;
  SpMat mass;          // domain mass matrix, used by the stopping criterion
  TraceSpace trace;
};

struct DNRecord {
  int k = 0;
  double eps_rt = 0.0;
  double eps_st = 0.0;
  double seconds = 0.0;
};

struct DNOptions {
  double relax = 0.5;
  double tol = 1e-3;
  int max_iter = 100;
  int trace_q = 6;     // quadrature points per trace element
};

struct DNResult {
  Eigen::VectorXd u_rt;
  Eigen::VectorXd u_st;
  Eigen::VectorXd gamma;      // rotor trace coefficients
  Eigen::VectorXd flux;       // rotor Neumann density (per unit angle), trace coefficients
  int iterations = 0;
  std::vector<DNRecord> history;
};

/// Raised when max_iter is reached; carries the error history.
class DNDivergence : public NumericalError {
 public:
  DNDivergence(const std::string& what, std::vector<DNRecord> history)
      : NumericalError(what), history_(std::move(history)) {}
  const std::vector<DNRecord>& history() const { return history_; }

 private:
  std::vector<DNRecord> history_;
};

class DNSolver {
 public:
  /// Both stiffness matrices must be nonsingular with the rotor interface
  /// DoFs free; `alpha` is the rotor angle.
  DNSolver(DNSubdomain rt, DNSubdomain st, Symmetry symmetry, double pitch, double alpha = 0.0, int trace_q = 6);

  struct RotorSolve {
    Eigen::VectorXd u;
    Eigen::VectorXd flux;  // trace coefficients of the Neumann density
  };
  /// Rotor solve with Dirichlet data gamma (rotor trace coefficients).
  RotorSolve dtn_rotor_solve(const Eigen::VectorXd& gamma) const;
  /// Stator solve with the Neumann density of the rotor imposed on the
  /// interface (with opposite orientation).
  Eigen::VectorXd ntd_stator_solve(const Eigen::VectorXd& rotor_flux) const;
  /// L2 projection of the stator interface trace onto the rotor trace space.
  Eigen::VectorXd stator_trace_on_rotor(const Eigen::VectorXd& u_st) const;

  DNResult iterate(const Eigen::VectorXd& gamma0, const DNOptions& opt) const;

  int rotor_trace_size() const { return rt_.trace.size(); }

 private:
  DNSubdomain rt_, st_;
  Symmetry symmetry_;
  double pitch_;
  double alpha_;
  int q_;
  std::vector<int> interior_;   // rotor DoFs off the interface
  SpMat k_ii_, k_ig_, k_gi_, k_gg_;
  SpdSolver rt_ii_, st_solver_;
  Eigen::LLT<Eigen::MatrixXd> trace_mass_;
};

/// gamma_new = relax * candidate + (1 - relax) * gamma
Eigen::VectorXd relax_update(const Eigen::VectorXd& candidate, const Eigen::VectorXd& gamma, double relax);

/// CSV: k,eps_rt,eps_st
void write_dn_log(const std::string& path, const std::vector<DNRecord>& history);

}  // namespace iga
