#include "iga/postproc.hpp"

#include "iga/errors.hpp"
#include "iga/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace iga {

namespace {
const cplx kI(0.0, 1.0);
}

SolutionField::SolutionField(const MultiPatchDomain& domain, const DiscreteSpace& space, const Eigen::VectorXd& u)
    : domain_(&domain), space_(&space), u_(u), local_(expand_local(space, u)) {}

FieldValue SolutionField::at_param(int patch, double xi, double eta) const {
  const PatchSpace& ps = space_->patch_space(patch);
  const BasisDerivs bu = bspline_eval(ps.u, xi, 1);
  const BasisDerivs bv = bspline_eval(ps.v, eta, 1);
  double v = 0.0;
  Vec2 gref = Vec2::Zero();
  for (int j = 0; j <= bv.degree; ++j) {
    for (int i = 0; i <= bu.degree; ++i) {
      const double c = local_[space_->offset(patch) + ps.index(bu.first + i, bv.first + j)];
      v += c * bu(0, i) * bv(0, j);
      gref += c * Vec2(bu(1, i) * bv(0, j), bu(0, i) * bv(1, j));
    }
  }
  const MapSample ms = domain_->patch(patch).eval(xi, eta);
  return FieldValue{v, ms.jacobian.inverse().transpose() * gref};
}

SolutionField::PointResult SolutionField::at_point(const Vec2& x) const {
  PointResult r;
  for (int p = 0; p < domain_->num_patches(); ++p) {
    const NurbsPatch& np = domain_->patch(p);
    const auto [lo, hi] = np.bounding_box();
    const double scale = (hi - lo).norm();
    const double slack = 1e-9 * scale;
    if (x.x() < lo.x() - slack || x.y() < lo.y() - slack || x.x() > hi.x() + slack || x.y() > hi.y() + slack) continue;
    for (const Vec2& guess : {Vec2(0.5, 0.5), Vec2(0.1, 0.1), Vec2(0.9, 0.1), Vec2(0.1, 0.9), Vec2(0.9, 0.9)}) {
      const InverseMapResult inv = inverse_map(np, x, guess);
      if (inv.converged && inv.residual < 1e-10 * std::max(scale, 1e-300)) {
        r.found = true;
        r.patch = p;
        r.param = inv.param;
        r.field = at_param(p, inv.param.x(), inv.param.y());
        return r;
      }
    }
  }
  return r;
}

L2Result error_l2(const SolutionField& field, const std::function<double(const Vec2&)>& exact, int q) {
  const Eigen::VectorXd local = expand_local(field.space(), field.coefficients());
  double e2 = 0.0, n2 = 0.0;
  for_each_element(field.domain(), field.space(), QuadratureRule(q), [&](const ElementData& ed) {
    for (int k = 0; k < ed.nq; ++k) {
      double uh = 0.0;
      for (int a = 0; a < ed.nb; ++a) uh += local[ed.local[a]] * ed.n[k * ed.nb + a];
      const double ue = exact(ed.x[k]);
      e2 += (uh - ue) * (uh - ue) * ed.wdet[k];
      n2 += ue * ue * ed.wdet[k];
    }
  });
  return L2Result{std::sqrt(e2), std::sqrt(n2)};
}

Eigen::VectorXd trace_coefficients(const TraceSpace& trace, const Eigen::VectorXd& u) {
  Eigen::VectorXd c(trace.size());
  const auto g = trace.global_dofs();
  for (int i = 0; i < trace.size(); ++i) c[i] = u[g[i]];
  return c;
}

double trace_value_wrapped(const TraceSpace& trace, const Eigen::VectorXd& coeffs, double theta, Symmetry symmetry,
                           double pitch) {
  const double k = std::floor((theta - trace.theta_begin()) / pitch + 1e-13);
  double t = theta - k * pitch;
  double sign = 1.0;
  if (symmetry == Symmetry::Antiperiodic && std::fmod(std::abs(k), 2.0) == 1.0) sign = -1.0;
  if (t > trace.theta_end()) {
    if (t - trace.theta_end() > 1e-12) {
      std::ostringstream os;
      os << "angle " << theta << " is not covered by the interface trace";
      throw DomainError(os.str());
    }
    t = trace.theta_end();
  }
  t = std::max(t, trace.theta_begin());
  return sign * trace.value(coeffs, t);
}

namespace {

std::vector<double> break_angles(const TraceSpace& t) {
  std::vector<double> out;
  for (const TraceSegment& s : t.segments()) {
    for (double b : s.knots.breakpoints()) out.push_back(s.angle(b));
  }
  return out;
}

}  // namespace

double error_jump(const TraceSpace& rt, const Eigen::VectorXd& u_rt, const TraceSpace& st, const Eigen::VectorXd& u_st,
                  double alpha, Symmetry symmetry, double pitch, int q) {
  const Eigen::VectorXd crt = trace_coefficients(rt, u_rt);
  const Eigen::VectorXd cst = trace_coefficients(st, u_st);
  const double a = st.theta_begin(), b = st.theta_end();
  std::vector<double> br = break_angles(st);
  for (double t : break_angles(rt)) {
    double s = t + alpha;
    s -= pitch * std::floor((s - a) / pitch);
    if (s >= a && s <= b) br.push_back(s);
  }
  br.push_back(a);
  br.push_back(b);
  std::sort(br.begin(), br.end());
  std::vector<double> uniq;
  for (double t : br) {
    if (uniq.empty() || t - uniq.back() > 1e-13) uniq.push_back(t);
  }
  const GaussRule g = gauss_legendre(q);
  double e2 = 0.0;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    const double h = uniq[i + 1] - uniq[i];
    for (int k = 0; k < g.size(); ++k) {
      const double th = uniq[i] + h * g.x[k];
      const double d = trace_value_wrapped(rt, crt, th - alpha, symmetry, pitch) - st.value(cst, th);
      e2 += g.w[k] * h * d * d;
    }
  }
  return std::sqrt(e2);
}

double error_multiplier(const HarmonicSet& set, const Eigen::VectorXcd& lambda,
                        const std::function<double(double)>& exact, double theta0, double theta1) {
  const GaussRule g = gauss_legendre(8);
  constexpr int n = 256;
  const double h = (theta1 - theta0) / n;
  double e2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < g.size(); ++k) {
      const double th = theta0 + h * (i + g.x[k]);
      const double d = exact(th) - multiplier_field(set, lambda, th).real();
      e2 += g.w[k] * h * d * d;
    }
  }
  return std::sqrt(e2);
}

double multiplier_imag_ratio(const HarmonicSet& set, const Eigen::VectorXcd& lambda, double theta0, double theta1,
                             int samples) {
  double im = 0.0, mag = 0.0;
  for (int s = 0; s < samples; ++s) {
    const cplx v = multiplier_field(set, lambda, theta0 + (theta1 - theta0) * s / (samples - 1));
    im = std::max(im, std::abs(v.imag()));
    mag = std::max(mag, std::abs(v));
  }
  return mag > 0 ? im / mag : im;
}

Eigen::MatrixXd flux_linkage_operator(const MultiPatchDomain& st, const DiscreteSpace& space,
                                      const std::vector<CoilSide>& coils, int n_turns, double axial_length, int poles,
                                      const QuadratureRule& quad) {
  std::map<int, int> coil_of;
  for (int c = 0; c < static_cast<int>(coils.size()); ++c) {
    for (int p : coils[c].patches) coil_of[p] = c;
  }
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(3, space.num_dofs());
  std::vector<double> fe;
  for_each_element(st, space, quad, [&](const ElementData& ed) {
    const auto it = coil_of.find(ed.patch);
    if (it == coil_of.end()) return;
    const CoilSide& cs = coils[it->second];
    const double scale = poles * axial_length * n_turns * cs.polarity / cs.area;
    fe.assign(ed.nb, 0.0);
    kernels::load(ed.n.data(), ed.wdet.data(), ed.nq, ed.nb, fe.data());
    for (int a = 0; a < ed.nb; ++a) {
      const DofMap& m = space.map_flat(ed.local[a]);
      if (m.global >= 0) op(cs.phase, m.global) += scale * m.sign * fe[a];
    }
  });
  return op;
}

Spectrum emf_spectrum(const std::vector<double>& alpha, const std::vector<double>& psi, double pitch, double omega) {
  const int n = static_cast<int>(psi.size());
  if (n < 2 || alpha.size() != psi.size()) throw DomainError("EMF spectrum needs matching alpha/psi samples");
  if (!(omega > 0) || !(pitch > 0)) throw DomainError("EMF spectrum needs positive speed and pitch");
  const double da = pitch / n;
  for (int j = 0; j < n; ++j) {
    if (std::abs(alpha[j] - alpha[0] - j * da) > 1e-9 * pitch) {
      throw DomainError("EMF spectrum needs a uniform rotor-angle grid over one pole pitch");
    }
  }
  const int m = 2 * n;
  std::vector<double> x(m);
  for (int j = 0; j < n; ++j) {
    x[j] = psi[j];
    x[j + n] = -psi[j];
  }
  const double w_el = std::numbers::pi * omega / pitch;
  std::vector<cplx> d(m, 0.0);  // coefficients of e, index k in [0, m)
  for (int k = 0; k < m; ++k) {
    if (2 * k == m) continue;  // Nyquist: derivative undefined, dropped
    cplx c = 0.0;
    for (int j = 0; j < m; ++j) c += x[j] * std::exp(-2.0 * std::numbers::pi * kI * static_cast<double>(k * j) / static_cast<double>(m));
    c /= static_cast<double>(m);
    const int ks = k < m - k ? k : k - m;  // signed order
    d[k] = -kI * (static_cast<double>(ks) * w_el) * c;
  }
  Spectrum s;
  s.f_el = w_el / (2.0 * std::numbers::pi);
  s.magnitude.assign(n + 1, 0.0);
  s.coeff.assign(n + 1, 0.0);
  for (int k = 1; k < n; ++k) {
    s.coeff[k] = 2.0 * d[k];
    s.magnitude[k] = std::abs(s.coeff[k]);
  }
  s.waveform.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    cplx v = 0.0;
    for (int k = 0; k < m; ++k) v += d[k] * std::exp(2.0 * std::numbers::pi * kI * static_cast<double>(k * j) / static_cast<double>(m));
    s.waveform[j] = v.real();
  }
  return s;
}

double thd(const Spectrum& s) {
  if (s.magnitude.size() < 2) throw DomainError("THD undefined: zero fundamental");
  const double peak = *std::max_element(s.magnitude.begin(), s.magnitude.end());
  if (!(s.magnitude[1] > 1e-12 * peak)) throw DomainError("THD undefined: zero fundamental");
  double h2 = 0.0;
  for (std::size_t k = 2; k < s.magnitude.size(); ++k) h2 += s.magnitude[k] * s.magnitude[k];
  return std::sqrt(h2) / s.magnitude[1];
}

}  // namespace iga
