#include "iga/trace.hpp"

#include "iga/errors.hpp"
#include "iga/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace iga {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double polar(const Vec2& p) { return std::atan2(p.y(), p.x()); }

}  // namespace

double TraceSegment::angle(double t) const {
  return theta0 + std::remainder(polar(curve.point(t)) - theta0, kTwoPi);
}

double TraceSegment::angle_rate(double t) const {
  const auto [x, dx] = curve.point_and_tangent(t);
  return (x.x() * dx.y() - x.y() * dx.x()) / x.squaredNorm();
}

double TraceSegment::param_at(double theta) const {
  const double span = theta1 - theta0;
  double a = 0.0, b = 1.0;
  double t = std::clamp((theta - theta0) / span, 0.0, 1.0);
  for (int it = 0; it < 60; ++it) {
    const double g = (angle(t) - theta) / span;  // increasing in t
    if (std::abs(g) < 1e-15) break;
    if (g > 0) b = t; else a = t;
    const double rate = angle_rate(t) / span;
    double next = t - g / rate;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    t = next;
  }
  return t;
}

TraceSpace trace_on_airgap(const DiscreteSpace& space, const MultiPatchDomain& domain) {
  TraceSpace ts;
  const auto sides = domain.sides_with(BoundaryTag::Airgap);
  if (sides.empty()) throw MismatchError("no side is tagged airgap");
  for (const SideRef& s : sides) {
    TraceSegment seg;
    seg.side = s;
    seg.curve = domain.patch(s.patch).boundary(s.side);
    const PatchSpace& ps = space.patch_space(s.patch);
    seg.knots = ps.side_knots(s.side);
    for (int l : ps.side_indices(s.side)) {
      const DofMap& m = space.map(s.patch, l);
      seg.dof.push_back(m.global);
      seg.sign.push_back(m.sign);
    }
    double t0 = polar(seg.curve.point(0.0));
    double t1 = t0 + std::remainder(polar(seg.curve.point(1.0)) - t0, kTwoPi);
    const double lo = std::min(t0, t1);
    double shift = -kTwoPi * std::floor(lo / kTwoPi);
    if (lo + shift > kTwoPi - 1e-12) shift -= kTwoPi;
    seg.theta0 = t0 + shift;
    seg.theta1 = t1 + shift;
    if (std::abs(seg.theta1 - seg.theta0) < 1e-14) {
      throw MismatchError("airgap side of patch " + std::to_string(s.patch) + " has no angular extent");
    }
    ts.segments_.push_back(std::move(seg));
  }
  std::sort(ts.segments_.begin(), ts.segments_.end(),
            [](const TraceSegment& a, const TraceSegment& b) { return a.lo() < b.lo(); });

  ts.radius_ = ts.segments_.front().curve.point(0.0).norm();
  ts.theta_begin_ = ts.segments_.front().lo();
  ts.theta_end_ = ts.segments_.back().hi();
  const GaussRule g = gauss_legendre(8);
  for (std::size_t k = 0; k < ts.segments_.size(); ++k) {
    const TraceSegment& seg = ts.segments_[k];
    if (k > 0 && std::abs(seg.lo() - ts.segments_[k - 1].hi()) > 1e-10) {
      std::ostringstream os;
      os << "airgap sides leave a gap or overlap near theta = " << seg.lo();
      throw MismatchError(os.str());
    }
    const auto br = seg.knots.breakpoints();
    for (std::size_t e = 0; e + 1 < br.size(); ++e) {
      for (int i = 0; i < g.size(); ++i) {
        const double r = seg.curve.point(br[e] + (br[e + 1] - br[e]) * g.x[i]).norm();
        ts.radius_dev_ = std::max(ts.radius_dev_, std::abs(r - ts.radius_) / ts.radius_);
      }
    }
  }
  if (ts.radius_dev_ > 1e-10) {
    std::ostringstream os;
    os << "airgap sides are not on one circle (relative radius spread " << ts.radius_dev_ << ")";
    throw MismatchError(os.str());
  }

  for (const TraceSegment& seg : ts.segments_) {
    for (int d : seg.dof) {
      if (d >= 0) ts.global_.push_back(d);
    }
  }
  std::sort(ts.global_.begin(), ts.global_.end());
  ts.global_.erase(std::unique(ts.global_.begin(), ts.global_.end()), ts.global_.end());
  for (TraceSegment& seg : ts.segments_) {
    for (int& d : seg.dof) {
      if (d >= 0) d = static_cast<int>(std::lower_bound(ts.global_.begin(), ts.global_.end(), d) - ts.global_.begin());
    }
  }
  return ts;
}

namespace {

void fill_basis(const TraceSegment& seg, TracePoint& tp) {
  const BasisDerivs b = bspline_eval(seg.knots, tp.t, 0);
  for (int j = 0; j <= b.degree; ++j) {
    const int l = b.first + j;
    if (seg.dof[l] < 0 || b(0, j) == 0.0) continue;
    tp.dof.push_back(seg.dof[l]);
    tp.value.push_back(seg.sign[l] * b(0, j));
  }
}

}  // namespace

std::vector<TracePoint> TraceSpace::quadrature(int q) const {
  const GaussRule g = gauss_legendre(q);
  std::vector<TracePoint> out;
  for (int s = 0; s < static_cast<int>(segments_.size()); ++s) {
    const TraceSegment& seg = segments_[s];
    const auto br = seg.knots.breakpoints();
    for (std::size_t e = 0; e + 1 < br.size(); ++e) {
      const double h = br[e + 1] - br[e];
      for (int i = 0; i < g.size(); ++i) {
        TracePoint tp;
        tp.segment = s;
        tp.t = br[e] + h * g.x[i];
        tp.point = seg.curve.point(tp.t);
        tp.theta = seg.angle(tp.t);
        tp.weight = g.w[i] * h * std::abs(seg.angle_rate(tp.t));
        fill_basis(seg, tp);
        out.push_back(std::move(tp));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const TracePoint& a, const TracePoint& b) { return a.theta < b.theta; });
  return out;
}

TracePoint TraceSpace::eval(double theta) const {
  constexpr double slack = 1e-12;
  if (theta < theta_begin_ - slack || theta > theta_end_ + slack) {
    std::ostringstream os;
    os << "angle " << theta << " outside the interface [" << theta_begin_ << ", " << theta_end_ << "]";
    throw DomainError(os.str());
  }
  int s = 0;
  while (s + 1 < static_cast<int>(segments_.size()) && theta > segments_[s].hi()) ++s;
  const TraceSegment& seg = segments_[s];
  TracePoint tp;
  tp.segment = s;
  tp.theta = theta;
  tp.t = seg.param_at(std::clamp(theta, seg.lo(), seg.hi()));
  tp.point = seg.curve.point(tp.t);
  fill_basis(seg, tp);
  return tp;
}

double TraceSpace::value(const Eigen::VectorXd& coeffs, double theta) const {
  const TracePoint tp = eval(theta);
  double v = 0.0;
  for (std::size_t k = 0; k < tp.dof.size(); ++k) v += tp.value[k] * coeffs[tp.dof[k]];
  return v;
}

Eigen::MatrixXd TraceSpace::mass(int q) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (const TracePoint& tp : quadrature(q)) {
    for (std::size_t a = 0; a < tp.dof.size(); ++a) {
      for (std::size_t b = 0; b < tp.dof.size(); ++b) {
        m(tp.dof[a], tp.dof[b]) += tp.weight * tp.value[a] * tp.value[b];
      }
    }
  }
  return m;
}

}  // namespace iga
