#include "iga/splines.hpp"

#include "iga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace iga {

namespace {

constexpr double kParamSlack = 1e-13;

double clamp_param(double xi) {
  if (!(xi >= -kParamSlack && xi <= 1.0 + kParamSlack)) {
    std::ostringstream msg;
    msg << "parameter " << xi << " outside [0,1]";
    throw DomainError(msg.str());
  }
  return std::clamp(xi, 0.0, 1.0);
}

// Homogeneous control point (w x, w y, w).
using Hpt = Eigen::Vector3d;

Hpt lift(const Vec2& p, double w) { return {p.x() * w, p.y() * w, w}; }
Vec2 project(const Hpt& h) { return {h.x() / h.z(), h.y() / h.z()}; }

// Boehm insertion of a single knot into a homogeneous control polygon.
void insert_knot(int p, std::vector<double>& U, std::vector<Hpt>& P, double u) {
  const KnotVector kv(p, U);
  const int k = kv.find_span(u);
  const int s = kv.multiplicity(u);
  if (s + 1 > p) {
    std::ostringstream msg;
    msg << "inserting knot " << u << " would exceed multiplicity " << p;
    throw DomainError(msg.str());
  }
  std::vector<Hpt> Q(P.size() + 1);
  for (int i = 0; i <= k - p; ++i) Q[i] = P[i];
  for (int i = k - p + 1; i <= k - s; ++i) {
    const double a = (u - U[i]) / (U[i + p] - U[i]);
    Q[i] = a * P[i] + (1.0 - a) * P[i - 1];
  }
  for (int i = k - s + 1; i < static_cast<int>(Q.size()); ++i) Q[i] = P[i - 1];
  U.insert(U.begin() + k + 1, u);
  P = std::move(Q);
}

void validate_insertions(std::span<const double> insert) {
  for (double u : insert) {
    if (!(u > 0.0 && u < 1.0)) {
      std::ostringstream msg;
      msg << "inserted knot " << u << " must lie strictly inside (0,1)";
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- KnotVector

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw DomainError("knot vector degree must be non-negative");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) throw DomainError("knot vector too short for its degree");
  for (int i = 0; i + 1 < m; ++i) {
    if (knots_[i] > knots_[i + 1]) throw DomainError("knot vector must be non-decreasing");
  }
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != 0.0 || knots_[m - 1 - i] != 1.0) {
      throw DomainError("knot vector must be open on [0,1] (end multiplicity p+1)");
    }
  }
  if (degree_ < m && knots_[degree_ + 1] == 0.0) throw DomainError("knot 0 has multiplicity above p+1");
  if (knots_[m - degree_ - 2] == 1.0) throw DomainError("knot 1 has multiplicity above p+1");
  for (int i = degree_ + 1; i < m - degree_ - 1; ++i) {
    if (multiplicity(knots_[i]) > degree_) throw DomainError("interior knot multiplicity exceeds degree");
  }
}

KnotVector KnotVector::uniform(int degree, int n_elements) {
  if (n_elements < 1) throw DomainError("need at least one element");
  std::vector<double> breaks(n_elements + 1);
  for (int e = 0; e <= n_elements; ++e) breaks[e] = static_cast<double>(e) / n_elements;
  breaks.back() = 1.0;
  return from_breakpoints(degree, breaks);
}

KnotVector KnotVector::from_breakpoints(int degree, std::span<const double> breaks) {
  if (breaks.size() < 2 || breaks.front() != 0.0 || breaks.back() != 1.0) {
    throw DomainError("breakpoints must start at 0 and end at 1");
  }
  std::vector<double> knots(degree + 1, 0.0);
  for (std::size_t i = 1; i + 1 < breaks.size(); ++i) knots.push_back(breaks[i]);
  knots.insert(knots.end(), degree + 1, 1.0);
  return KnotVector(degree, std::move(knots));
}

int KnotVector::find_span(double xi) const {
  xi = clamp_param(xi);
  const int n = dimension();
  if (xi >= knots_[n]) return n - 1;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), xi);
  return static_cast<int>(it - knots_.begin()) - 1;
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double k : knots_) {
    if (b.empty() || k != b.back()) b.push_back(k);
  }
  return b;
}

int KnotVector::multiplicity(double value) const {
  return static_cast<int>(std::count(knots_.begin(), knots_.end(), value));
}

KnotVector KnotVector::reversed() const {
  std::vector<double> r(knots_.rbegin(), knots_.rend());
  for (double& k : r) k = 1.0 - k;
  return KnotVector(degree_, std::move(r));
}

bool KnotVector::operator==(const KnotVector& other) const {
  if (degree_ != other.degree_ || knots_.size() != other.knots_.size()) return false;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (std::abs(knots_[i] - other.knots_[i]) > 1e-14) return false;
  }
  return true;
}

// ------------------------------------------------------------- basis values

BasisDerivs bspline_eval(const KnotVector& kv, double xi, int deriv_order) {
  if (deriv_order < 0) throw DomainError("derivative order must be non-negative");
  xi = clamp_param(xi);
  const int p = kv.degree();
  const int span = kv.find_span(xi);
  const auto U = kv.knots();
  const int n = std::min(deriv_order, p);

  BasisDerivs out;
  out.first = span - p;
  out.degree = p;
  out.order = deriv_order;
  out.data.assign((deriv_order + 1) * (p + 1), 0.0);

  // Triangular table of basis values (upper) and knot differences (lower).
  std::vector<double> ndu((p + 1) * (p + 1));
  auto NDU = [&](int r, int c) -> double& { return ndu[r * (p + 1) + c]; };
  std::vector<double> left(p + 1), right(p + 1);
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - U[span + 1 - j];
    right[j] = U[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      NDU(j, r) = right[r + 1] + left[j - r];
      const double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    NDU(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out(0, j) = NDU(j, p);

  std::vector<double> a(2 * (p + 1));
  auto A = [&](int s, int c) -> double& { return a[s * (p + 1) + c]; };
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    A(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
        d = A(s2, 0) * NDU(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
        d += A(s2, j) * NDU(rk + j, pk);
      }
      if (r <= pk) {
        A(s2, k) = -A(s1, k - 1) / NDU(pk + 1, r);
        d += A(s2, k) * NDU(r, pk);
      }
      out(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) out(k, j) *= fac;
    fac *= (p - k);
  }
  return out;
}

BasisDerivs nurbs_basis_eval(const KnotVector& kv, std::span<const double> weights, double xi, int deriv_order) {
  if (static_cast<int>(weights.size()) != kv.dimension()) {
    throw MismatchError("weight count does not match basis dimension");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("NURBS weights must be positive");
  }
  BasisDerivs b = bspline_eval(kv, xi, deriv_order);
  const int p = b.degree;
  const int K = deriv_order;

  // Weighted B-splines A_j^(m) and the weight function W^(m).
  std::vector<double> W(K + 1, 0.0);
  for (int m = 0; m <= K; ++m) {
    for (int j = 0; j <= p; ++j) {
      b(m, j) *= weights[b.first + j];
      W[m] += b(m, j);
    }
  }
  // Leibniz rule: R^(k) = (A^(k) - sum_{i=1..k} C(k,i) W^(i) R^(k-i)) / W.
  BasisDerivs r = b;
  for (int k = 0; k <= K; ++k) {
    for (int j = 0; j <= p; ++j) {
      double v = b(k, j);
      double binom = 1.0;
      for (int i = 1; i <= k; ++i) {
        binom = binom * (k - i + 1) / i;
        v -= binom * W[i] * r(k - i, j);
      }
      r(k, j) = v / W[0];
    }
  }
  return r;
}

// ---------------------------------------------------------------- NurbsCurve

NurbsCurve::NurbsCurve(KnotVector kv, std::vector<Vec2> points, std::vector<double> weights)
    : kv_(std::move(kv)), points_(std::move(points)), weights_(std::move(weights)) {
  if (static_cast<int>(points_.size()) != kv_.dimension() || weights_.size() != points_.size()) {
    throw MismatchError("curve control points/weights do not match basis dimension");
  }
  for (double w : weights_) {
    if (!(w > 0.0)) throw DomainError("NURBS weights must be positive");
  }
}

Vec2 NurbsCurve::point(double xi) const { return point_and_tangent(xi).first; }

std::pair<Vec2, Vec2> NurbsCurve::point_and_tangent(double xi) const {
  const BasisDerivs r = nurbs_basis_eval(kv_, weights_, xi, 1);
  Vec2 x = Vec2::Zero(), dx = Vec2::Zero();
  for (int j = 0; j <= r.degree; ++j) {
    x += r(0, j) * points_[r.first + j];
    dx += r(1, j) * points_[r.first + j];
  }
  return {x, dx};
}

NurbsCurve make_circular_arc(double radius, double theta0, double theta1, const Vec2& center) {
  if (!(radius > 0.0)) throw DomainError("arc radius must be positive");
  const double sweep = theta1 - theta0;
  if (!(sweep > 0.0) || sweep > 2.0 * std::numbers::pi + 1e-12) {
    throw DomainError("arc sweep must lie in (0, 2*pi]");
  }
  const int nseg = std::max(1, static_cast<int>(std::ceil(sweep / (0.5 * std::numbers::pi) - 1e-12)));
  const double dtheta = sweep / nseg;
  const double half = 0.5 * dtheta;
  const double w_mid = std::cos(half);

  std::vector<double> knots = {0.0, 0.0, 0.0};
  for (int s = 1; s < nseg; ++s) {
    const double k = static_cast<double>(s) / nseg;
    knots.push_back(k);
    knots.push_back(k);
  }
  knots.insert(knots.end(), {1.0, 1.0, 1.0});

  std::vector<Vec2> pts;
  std::vector<double> w;
  auto on_circle = [&](double t) { return Vec2(center + radius * Vec2(std::cos(t), std::sin(t))); };
  pts.push_back(on_circle(theta0));
  w.push_back(1.0);
  for (int s = 0; s < nseg; ++s) {
    const double a0 = theta0 + s * dtheta;
    const double am = a0 + half;
    const double a1 = (s + 1 == nseg) ? theta1 : a0 + dtheta;
    pts.push_back(center + (radius / w_mid) * Vec2(std::cos(am), std::sin(am)));
    w.push_back(w_mid);
    pts.push_back(on_circle(a1));
    w.push_back(1.0);
  }
  return NurbsCurve(KnotVector(2, std::move(knots)), std::move(pts), std::move(w));
}

NurbsCurve make_line(const Vec2& a, const Vec2& b, int degree) {
  if (degree < 1) throw DomainError("line degree must be at least 1");
  std::vector<Vec2> pts(degree + 1);
  for (int i = 0; i <= degree; ++i) pts[i] = a + (static_cast<double>(i) / degree) * (b - a);
  std::vector<double> knots(degree + 1, 0.0);
  knots.insert(knots.end(), degree + 1, 1.0);
  return NurbsCurve(KnotVector(degree, std::move(knots)), std::move(pts), std::vector<double>(degree + 1, 1.0));
}

const char* side_name(Side s) {
  switch (s) {
    case Side::South: return "south";
    case Side::East: return "east";
    case Side::North: return "north";
    case Side::West: return "west";
  }
  return "?";
}

// ---------------------------------------------------------------- NurbsPatch

NurbsPatch::NurbsPatch(KnotVector ku, KnotVector kv, std::vector<Vec2> net, std::vector<double> weights)
    : ku_(std::move(ku)), kv_(std::move(kv)), net_(std::move(net)), weights_(std::move(weights)) {
  const std::size_t n = static_cast<std::size_t>(n_u()) * n_v();
  if (net_.size() != n || weights_.size() != n) {
    throw MismatchError("control net size does not match the tensor basis dimension");
  }
  for (double w : weights_) {
    if (!(w > 0.0)) throw DomainError("NURBS weights must be positive");
  }
}

NurbsPatch NurbsPatch::ruled(const NurbsCurve& bottom, const NurbsCurve& top) {
  if (!(bottom.knots() == top.knots())) throw MismatchError("ruled patch needs curves with identical knots");
  std::vector<Vec2> net(bottom.points().begin(), bottom.points().end());
  net.insert(net.end(), top.points().begin(), top.points().end());
  std::vector<double> w(bottom.weights().begin(), bottom.weights().end());
  w.insert(w.end(), top.weights().begin(), top.weights().end());
  return NurbsPatch(bottom.knots(), KnotVector(1, {0.0, 0.0, 1.0, 1.0}), std::move(net), std::move(w));
}

MapSample NurbsPatch::eval(double xi, double eta) const {
  const BasisDerivs bu = bspline_eval(ku_, xi, 1);
  const BasisDerivs bv = bspline_eval(kv_, eta, 1);
  Eigen::Vector3d S = Eigen::Vector3d::Zero(), Su = Eigen::Vector3d::Zero(), Sv = Eigen::Vector3d::Zero();
  for (int b = 0; b <= bv.degree; ++b) {
    const int j = bv.first + b;
    for (int a = 0; a <= bu.degree; ++a) {
      const int i = bu.first + a;
      const Hpt h = lift(control(i, j), weight(i, j));
      S += bu(0, a) * bv(0, b) * h;
      Su += bu(1, a) * bv(0, b) * h;
      Sv += bu(0, a) * bv(1, b) * h;
    }
  }
  MapSample out;
  out.point = project(S);
  const double W = S.z();
  out.jacobian.col(0) = (Su.head<2>() - Su.z() * out.point) / W;
  out.jacobian.col(1) = (Sv.head<2>() - Sv.z() * out.point) / W;
  out.det = out.jacobian.determinant();
  return out;
}

NurbsCurve NurbsPatch::boundary(Side side) const {
  std::vector<Vec2> pts;
  std::vector<double> w;
  if (side == Side::South || side == Side::North) {
    const int j = side == Side::South ? 0 : n_v() - 1;
    for (int i = 0; i < n_u(); ++i) {
      pts.push_back(control(i, j));
      w.push_back(weight(i, j));
    }
    return NurbsCurve(ku_, std::move(pts), std::move(w));
  }
  const int i = side == Side::West ? 0 : n_u() - 1;
  for (int j = 0; j < n_v(); ++j) {
    pts.push_back(control(i, j));
    w.push_back(weight(i, j));
  }
  return NurbsCurve(kv_, std::move(pts), std::move(w));
}

std::pair<Vec2, Vec2> NurbsPatch::bounding_box() const {
  Vec2 lo = net_.front(), hi = net_.front();
  for (const Vec2& p : net_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

MapSample surface_map_eval(const NurbsPatch& patch, double xi, double eta) { return patch.eval(xi, eta); }

// ---------------------------------------------------------------- refinement

KnotVector h_refine(const KnotVector& kv, std::span<const double> insert) {
  validate_insertions(insert);
  std::vector<double> k(kv.knots().begin(), kv.knots().end());
  k.insert(k.end(), insert.begin(), insert.end());
  std::sort(k.begin(), k.end());
  return KnotVector(kv.degree(), std::move(k));
}

NurbsCurve h_refine(const NurbsCurve& curve, std::span<const double> insert) {
  validate_insertions(insert);
  std::vector<double> U(curve.knots().knots().begin(), curve.knots().knots().end());
  std::vector<Hpt> P;
  for (std::size_t i = 0; i < curve.points().size(); ++i) P.push_back(lift(curve.points()[i], curve.weights()[i]));
  for (double u : insert) insert_knot(curve.knots().degree(), U, P, u);
  std::vector<Vec2> pts;
  std::vector<double> w;
  for (const Hpt& h : P) {
    pts.push_back(project(h));
    w.push_back(h.z());
  }
  return NurbsCurve(KnotVector(curve.knots().degree(), std::move(U)), std::move(pts), std::move(w));
}

NurbsPatch h_refine(const NurbsPatch& patch, std::span<const double> insert_u, std::span<const double> insert_v) {
  validate_insertions(insert_u);
  validate_insertions(insert_v);
  const int pu = patch.knots_u().degree(), pv = patch.knots_v().degree();
  int nu = patch.n_u(), nv = patch.n_v();
  std::vector<Hpt> H(static_cast<std::size_t>(nu) * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) H[i + nu * j] = lift(patch.control(i, j), patch.weight(i, j));

  // u direction: refine each row.
  std::vector<double> Uu(patch.knots_u().knots().begin(), patch.knots_u().knots().end());
  if (!insert_u.empty()) {
    std::vector<std::vector<Hpt>> rows(nv);
    std::vector<double> Ufinal;
    for (int j = 0; j < nv; ++j) {
      std::vector<double> U = Uu;
      rows[j].assign(H.begin() + nu * j, H.begin() + nu * (j + 1));
      for (double u : insert_u) insert_knot(pu, U, rows[j], u);
      Ufinal = U;
    }
    Uu = Ufinal;
    nu = static_cast<int>(rows[0].size());
    H.assign(static_cast<std::size_t>(nu) * nv, Hpt::Zero());
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) H[i + nu * j] = rows[j][i];
  }
  std::vector<double> Uv(patch.knots_v().knots().begin(), patch.knots_v().knots().end());
  if (!insert_v.empty()) {
    std::vector<std::vector<Hpt>> cols(nu);
    std::vector<double> Vfinal;
    for (int i = 0; i < nu; ++i) {
      std::vector<double> V = Uv;
      for (int j = 0; j < nv; ++j) cols[i].push_back(H[i + nu * j]);
      for (double v : insert_v) insert_knot(pv, V, cols[i], v);
      Vfinal = V;
    }
    Uv = Vfinal;
    nv = static_cast<int>(cols[0].size());
    H.assign(static_cast<std::size_t>(nu) * nv, Hpt::Zero());
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) H[i + nu * j] = cols[i][j];
  }
  std::vector<Vec2> net;
  std::vector<double> w;
  for (const Hpt& h : H) {
    net.push_back(project(h));
    w.push_back(h.z());
  }
  return NurbsPatch(KnotVector(pu, std::move(Uu)), KnotVector(pv, std::move(Uv)), std::move(net), std::move(w));
}

std::vector<double> uniform_insertions(const KnotVector& kv, int factor) {
  if (factor < 1) throw DomainError("refinement factor must be at least 1");
  const auto b = kv.breakpoints();
  std::vector<double> out;
  for (std::size_t e = 0; e + 1 < b.size(); ++e) {
    for (int s = 1; s < factor; ++s) out.push_back(b[e] + (b[e + 1] - b[e]) * s / factor);
  }
  return out;
}

// --------------------------------------------------------------- inverse map

InverseMapResult inverse_map(const NurbsPatch& patch, const Vec2& point, const Vec2& guess, double tol, int max_iter) {
  InverseMapResult res;
  Vec2 x = guess.cwiseMax(0.0).cwiseMin(1.0);
  MapSample s = patch.eval(x.x(), x.y());
  double r = (s.point - point).norm();
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (r < tol) break;
    if (std::abs(s.det) < 1e-300) break;
    const Vec2 step = s.jacobian.inverse() * (point - s.point);
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      const Vec2 trial = (x + t * step).cwiseMax(0.0).cwiseMin(1.0);
      const MapSample ts = patch.eval(trial.x(), trial.y());
      const double tr = (ts.point - point).norm();
      if (tr < r) {
        x = trial;
        s = ts;
        r = tr;
        improved = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!improved) break;
  }
  res.param = x;
  res.residual = r;
  res.converged = r < tol;
  return res;
}

}  // namespace iga
