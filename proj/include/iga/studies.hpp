#pragma once

// Study drivers shared by the command-line tool and the acceptance runner.

#include "iga/config.hpp"
#include "iga/models.hpp"
#include "iga/mortar.hpp"
#include "iga/postproc.hpp"
#include "iga/substructuring.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iga {

// ---- verification (quarter ring, manufactured solution)

struct ConvergenceRow {
  int degree = 0;
  int level = 0;
  double h = 0.0;
  int ndof = 0;
  double err_l2 = 0.0;
  double err_jump = 0.0;
  double err_lambda = 0.0;
  double residual = 0.0;
  double constraint = 0.0;
};

ConvergenceRow verification_point(int degree, int level, int max_order, double r_split = 1.5, int quadrature = 0);

/// Least-squares slope of log(e) against log(h); nullopt below two points.
std::optional<double> fit_slope(const std::vector<double>& h, const std::vector<double>& e);

struct Slopes {
  std::optional<double> l2, jump, lambda;
};
Slopes fit_slopes(const std::vector<ConvergenceRow>& rows);

struct InfSupRow {
  int degree = 0;
  int level = 0;
  double h = 0.0;
  int ndof = 0;
  int max_order = 0;
  int n_harmonics = 0;
  double beta = 0.0;            // NaN when the harmonic mass matrix is not resolved
  double mass_condition = 0.0;
};

/// Inf-sup constant of the quarter-ring coupling with harmonics -m..m.
InfSupRow infsup_point(int degree, int level, int max_order, double r_split = 1.5);

/// Mortar solution on the conforming quarter ring against the single-domain
/// solve of the same space; relative L2 difference.
double mortar_vs_monolithic(int degree, int level, double r_split = 1.5);

// ---- coupled problems on two subdomains

class CoupledProblem {
 public:
  /// Machine pole (antiperiodic) with the given discretization.
  static CoupledProblem machine(const MachineParams& params, int degree, int level, int max_order, int quadrature = 0);
  /// Quarter ring with the manufactured source (periodic harmonics).
  static CoupledProblem verification(int degree, int level, int max_order, double r_split = 1.5,
                                     int quadrature = 0);

  const TwoDomainModel& domains() const { return domains_; }
  const std::optional<MachineModel>& machine_model() const { return machine_; }
  const DiscreteSpace& space_rt() const { return *space_rt_; }
  const DiscreteSpace& space_st() const { return *space_st_; }
  const TraceSpace& trace_rt() const { return *trace_rt_; }
  const TraceSpace& trace_st() const { return *trace_st_; }
  const HarmonicSet& harmonics() const { return set_; }
  const SpMat& mass_rt() const { return m_rt_; }
  const SpMat& mass_st() const { return m_st_; }
  int degree() const { return degree_; }
  int level() const { return level_; }
  Symmetry symmetry() const { return set_.symmetry; }
  double pitch() const { return set_.pitch; }
  /// Spaces, stiffness, sources and traces (shared by both couplings).
  double assembly_seconds() const { return assembly_seconds_; }
  /// Domain mass matrices (DN stopping criterion).
  double mass_seconds() const { return mass_seconds_; }

  /// Harmonic coupling. The first call assembles the coupling matrices and
  /// factors the subdomain matrices; later angles reuse them.
  CoupledSolution solve_harmonic(double alpha) const;
  double harmonic_setup_seconds() const { return harmonic_setup_seconds_; }

  DNResult solve_dn(double alpha, const DNOptions& opt) const;

  /// Flux linkage (3 phases) of a stator solution; machine only.
  std::array<double, 3> flux_linkage(const Eigen::VectorXd& u_st) const;

  /// Relative L2 distance of two (u_rt, u_st) pairs over both subdomains.
  double relative_difference(const Eigen::VectorXd& a_rt, const Eigen::VectorXd& a_st, const Eigen::VectorXd& b_rt,
                             const Eigen::VectorXd& b_st) const;

 private:
  CoupledProblem() = default;
  void assemble();

  TwoDomainModel domains_;
  std::optional<MachineModel> machine_;
  int degree_ = 0, level_ = 0, quad_ = 0;
  HarmonicSet set_;
  std::shared_ptr<DiscreteSpace> space_rt_, space_st_;
  std::shared_ptr<TraceSpace> trace_rt_, trace_st_;
  SpMat k_rt_, k_st_, m_rt_, m_st_;
  Eigen::VectorXd j_rt_, j_st_;
  Eigen::MatrixXd psi_op_;
  double assembly_seconds_ = 0.0;
  double mass_seconds_ = 0.0;
  mutable std::shared_ptr<CoupledSweep> sweep_;
  mutable CSpMat g_rt_, g_st_;
  mutable double harmonic_setup_seconds_ = 0.0;
};

struct EmfResult {
  std::vector<double> alpha;
  std::array<std::vector<double>, 3> psi;
  std::array<Spectrum, 3> spectrum;
  double thd = 0.0;               // phase a
  double thd_non_triplen = 0.0;   // phase a, multiples of 3 removed
  double even_ratio = 0.0;        // max even |E_k| / |E_1|
  double antiperiodic_defect = 0.0;  // |Psi(alpha + tau) + Psi(alpha)| / max |Psi| at alpha = 0
  int dn_iterations_max = 0;
};

/// Rotor sweep over one pole pitch with `samples` uniform angles. `speed`
/// is the mechanical speed in rad/s.
EmfResult emf_sweep(const CoupledProblem& problem, int samples, double speed, Coupling method,
                    const DNOptions& dn = {});

// ---- command entry points (write into cfg.output, return the exit code)

struct CommandOptions {
  int threads = 1;
  bool verbose = false;
};

int cmd_verify(const RunConfig& cfg, const CommandOptions& opt);
int cmd_infsup(const RunConfig& cfg, const CommandOptions& opt);
int cmd_solve(const RunConfig& cfg, const CommandOptions& opt);
int cmd_emf(const RunConfig& cfg, const CommandOptions& opt);
int run_study(const RunConfig& cfg, const CommandOptions& opt);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Fixed scientific formatting used by every data file.
std::string fmt(double v);

}  // namespace iga
