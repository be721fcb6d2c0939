#include "iga/substructuring.hpp"

#include "iga/errors.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace iga {

namespace {

SpMat select(const SpMat& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> rmap(a.rows(), -1), cmap(a.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) cmap[cols[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int r = rmap[it.row()], c = cmap[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  }
  SpMat s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

double mass_norm(const SpMat& m, const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(m * v))); }

double rel_change(const SpMat& m, const Eigen::VectorXd& now, const Eigen::VectorXd& before) {
  const double n = mass_norm(m, now);
  const double d = mass_norm(m, now - before);
  if (n == 0.0) return d == 0.0 ? 0.0 : 1.0;
  return d / n;
}

}  // namespace

DNSolver::DNSolver(DNSubdomain rt, DNSubdomain st, Symmetry symmetry, double pitch, double alpha, int trace_q)
    : rt_(std::move(rt)), st_(std::move(st)), symmetry_(symmetry), pitch_(pitch), alpha_(alpha), q_(trace_q) {
  const int n = static_cast<int>(rt_.k.rows());
  if (rt_.j.size() != n || st_.j.size() != st_.k.rows()) throw MismatchError("DN: right-hand side size mismatch");
  const auto g = rt_.trace.global_dofs();
  std::vector<int> gamma(g.begin(), g.end());
  std::vector<char> on(n, 0);
  for (int i : gamma) on[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (!on[i]) interior_.push_back(i);
  }
  k_ii_ = select(rt_.k, interior_, interior_);
  k_ig_ = select(rt_.k, interior_, gamma);
  k_gi_ = select(rt_.k, gamma, interior_);
  k_gg_ = select(rt_.k, gamma, gamma);
  rt_ii_.factor(k_ii_);
  st_solver_.factor(st_.k);
  trace_mass_.compute(rt_.trace.mass(q_));
  if (trace_mass_.info() != Eigen::Success) throw NumericalError("DN: singular rotor trace mass matrix");
}

DNSolver::RotorSolve DNSolver::dtn_rotor_solve(const Eigen::VectorXd& gamma) const {
  if (gamma.size() != rt_.trace.size()) throw MismatchError("DN: Dirichlet data does not match the rotor trace");
  Eigen::VectorXd j_i(interior_.size());
  for (std::size_t i = 0; i < interior_.size(); ++i) j_i[i] = rt_.j[interior_[i]];
  const Eigen::VectorXd u_i = rt_ii_.solve(Eigen::VectorXd(j_i - k_ig_ * gamma));
  RotorSolve r;
  r.u = Eigen::VectorXd::Zero(rt_.k.rows());
  for (std::size_t i = 0; i < interior_.size(); ++i) r.u[interior_[i]] = u_i[i];
  const auto g = rt_.trace.global_dofs();
  Eigen::VectorXd j_g(g.size());
  for (int i = 0; i < rt_.trace.size(); ++i) {
    r.u[g[i]] = gamma[i];
    j_g[i] = rt_.j[g[i]];
  }
  const Eigen::VectorXd resid = k_gi_ * u_i + k_gg_ * gamma - j_g;
  r.flux = trace_mass_.solve(resid);
  return r;
}

Eigen::VectorXd DNSolver::ntd_stator_solve(const Eigen::VectorXd& rotor_flux) const {
  Eigen::VectorXd f = st_.j;
  const auto g = st_.trace.global_dofs();
  for (const TracePoint& tp : st_.trace.quadrature(q_)) {
    const double qv = trace_value_wrapped(rt_.trace, rotor_flux, tp.theta - alpha_, symmetry_, pitch_);
    for (std::size_t k = 0; k < tp.dof.size(); ++k) f[g[tp.dof[k]]] -= qv * tp.value[k] * tp.weight;
  }
  return st_solver_.solve(f);
}

Eigen::VectorXd DNSolver::stator_trace_on_rotor(const Eigen::VectorXd& u_st) const {
  const Eigen::VectorXd cst = trace_coefficients(st_.trace, u_st);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rt_.trace.size());
  for (const TracePoint& tp : rt_.trace.quadrature(q_)) {
    const double v = trace_value_wrapped(st_.trace, cst, tp.theta + alpha_, symmetry_, pitch_);
    for (std::size_t k = 0; k < tp.dof.size(); ++k) b[tp.dof[k]] += v * tp.value[k] * tp.weight;
  }
  return trace_mass_.solve(b);
}

Eigen::VectorXd relax_update(const Eigen::VectorXd& candidate, const Eigen::VectorXd& gamma, double relax) {
  return relax * candidate + (1.0 - relax) * gamma;
}

DNResult DNSolver::iterate(const Eigen::VectorXd& gamma0, const DNOptions& opt) const {
  if (!(opt.relax > 0.0 && opt.relax <= 1.0)) throw DomainError("DN relaxation factor must lie in (0, 1]");
  if (!(opt.tol > 0.0)) throw DomainError("DN tolerance must be positive");
  if (opt.max_iter < 1) throw DomainError("DN max_iter must be positive");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  DNResult res;
  Eigen::VectorXd gamma = gamma0;
  Eigen::VectorXd prev_rt = Eigen::VectorXd::Zero(rt_.k.rows());
  Eigen::VectorXd prev_st = Eigen::VectorXd::Zero(st_.k.rows());
  for (int k = 1; k <= opt.max_iter; ++k) {
    const RotorSolve rs = dtn_rotor_solve(gamma);
    const Eigen::VectorXd u_st = ntd_stator_solve(rs.flux);
    DNRecord rec;
    rec.k = k;
    rec.eps_rt = rel_change(rt_.mass, rs.u, prev_rt);
    rec.eps_st = rel_change(st_.mass, u_st, prev_st);
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    res.history.push_back(rec);
    if (rec.eps_rt < opt.tol && rec.eps_st < opt.tol) {
      res.u_rt = rs.u;
      res.u_st = u_st;
      res.gamma = gamma;
      res.flux = rs.flux;
      res.iterations = k;
      return res;
    }
    gamma = relax_update(stator_trace_on_rotor(u_st), gamma, opt.relax);
    prev_rt = rs.u;
    prev_st = u_st;
  }
  std::ostringstream os;
  os << "DN iteration did not reach tol " << opt.tol << " in " << opt.max_iter << " iterations (last eps_rt "
     << res.history.back().eps_rt << ", eps_st " << res.history.back().eps_st << ")";
  throw DNDivergence(os.str(), res.history);
}

void write_dn_log(const std::string& path, const std::vector<DNRecord>& history) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << "k,eps_rt,eps_st\n" << std::scientific << std::setprecision(9);
  for (const DNRecord& r : history) f << r.k << "," << r.eps_rt << "," << r.eps_st << "\n";
}

}  // namespace iga
