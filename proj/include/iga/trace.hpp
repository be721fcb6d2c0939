#pragma once

// Restriction of a discrete space to the circular air-gap interface,
// parametrized by the physical polar angle.

#include "iga/multipatch.hpp"

#include <vector>

namespace iga {

/// One patch edge lying on the interface circle.
struct TraceSegment {
  SideRef side;
  NurbsCurve curve;            // geometry edge, oriented like the patch side
  KnotVector knots;            // solution-space knots along the side
  std::vector<int> dof;        // trace index per side-local function (-1: eliminated)
  std::vector<double> sign;    // sign per side-local function
  double theta0 = 0.0;         // angle at curve parameter 0
  double theta1 = 0.0;         // angle at curve parameter 1 (unwrapped)

  double lo() const { return std::min(theta0, theta1); }
  double hi() const { return std::max(theta0, theta1); }
  double angle(double t) const;
  /// dtheta/dt (negative when the side runs clockwise).
  double angle_rate(double t) const;
  /// Curve parameter at angle theta in [lo, hi].
  double param_at(double theta) const;
};

/// Quadrature point on the interface with the nonzero trace functions.
struct TracePoint {
  int segment = 0;
  double t = 0.0;          // side parameter
  double theta = 0.0;
  double weight = 0.0;     // quadrature weight in the angle measure
  Vec2 point;
  std::vector<int> dof;    // trace indices (eliminated functions omitted)
  std::vector<double> value;
};

class TraceSpace {
 public:
  TraceSpace() = default;

  int size() const { return static_cast<int>(global_.size()); }
  /// Global DoF index of each trace function, increasing.
  std::span<const int> global_dofs() const { return global_; }
  std::span<const TraceSegment> segments() const { return segments_; }
  double radius() const { return radius_; }
  double theta_begin() const { return theta_begin_; }
  double theta_end() const { return theta_end_; }
  double extent() const { return theta_end_ - theta_begin_; }
  /// Largest relative radial deviation seen at sampled/quadrature points.
  double radius_deviation() const { return radius_dev_; }

  /// Gauss points (q per trace element) over all segments, increasing angle.
  std::vector<TracePoint> quadrature(int q) const;

  /// Nonzero trace functions at an angle within [theta_begin, theta_end].
  TracePoint eval(double theta) const;

  /// Trace function values combined with trace coefficients.
  double value(const Eigen::VectorXd& coeffs, double theta) const;

  /// Mass matrix of the trace functions in the angle measure.
  Eigen::MatrixXd mass(int q) const;

  friend TraceSpace trace_on_airgap(const DiscreteSpace& space, const MultiPatchDomain& domain);

 private:
  std::vector<TraceSegment> segments_;
  std::vector<int> global_;
  double radius_ = 0.0;
  double theta_begin_ = 0.0;
  double theta_end_ = 0.0;
  double radius_dev_ = 0.0;
};

/// Builds the trace of `space` on all sides tagged Airgap. Throws
/// MismatchError when the sides do not share one circle about the origin.
TraceSpace trace_on_airgap(const DiscreteSpace& space, const MultiPatchDomain& domain);

}  // namespace iga
