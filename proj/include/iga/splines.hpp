#pragma once

// B-spline / NURBS bases, curves and tensor-product patches.
//
// Conventions: parameters live in [0,1]; control nets of patches are stored
// with the u index running fastest (index = i + n_u * j); patch sides are
// named after the compass with u pointing east and v pointing north.

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace iga {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Open (clamped) knot vector on [0,1].
class KnotVector {
 public:
  KnotVector() = default;
  /// Validates monotonicity, the [0,1] range, end multiplicity p+1 and that
  /// no interior knot exceeds multiplicity p.
  KnotVector(int degree, std::vector<double> knots);

  /// Uniform open knot vector with `n_elements` equal spans, C^{p-1} inside.
  static KnotVector uniform(int degree, int n_elements);
  /// Open knot vector over the given strictly increasing breakpoints
  /// (first 0, last 1), C^{p-1} at every interior breakpoint.
  static KnotVector from_breakpoints(int degree, std::span<const double> breaks);

  int degree() const noexcept { return degree_; }
  std::span<const double> knots() const noexcept { return knots_; }
  double operator[](std::size_t i) const { return knots_[i]; }
  std::size_t size() const noexcept { return knots_.size(); }

  /// Basis dimension n = len(knots) - p - 1.
  int dimension() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }

  /// Knot index i with knots[i] <= xi < knots[i+1]; xi = 1 maps to the last
  /// non-empty span. Throws DomainError outside [0,1].
  int find_span(double xi) const;

  /// Distinct knot values, i.e. element boundaries.
  std::vector<double> breakpoints() const;
  int num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }
  int multiplicity(double value) const;

  /// Knot vector of the reversed parametrization xi -> 1 - xi.
  KnotVector reversed() const;

  bool operator==(const KnotVector& other) const;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

/// Values and derivatives of the p+1 basis functions that are nonzero at a
/// parameter. Entry (m, j) is the m-th derivative of function `first + j`.
struct BasisDerivs {
  int first = 0;
  int degree = 0;
  int order = 0;
  std::vector<double> data;

  double operator()(int m, int j) const { return data[m * (degree + 1) + j]; }
  double& operator()(int m, int j) { return data[m * (degree + 1) + j]; }
};

/// Cox-de Boor evaluation of all derivatives up to `deriv_order` in one pass.
/// Orders above the degree are returned as zeros.
BasisDerivs bspline_eval(const KnotVector& kv, double xi, int deriv_order);

/// Rational basis N_i = w_i B_i / sum_j w_j B_j and its derivatives.
BasisDerivs nurbs_basis_eval(const KnotVector& kv, std::span<const double> weights, double xi,
                             int deriv_order);

/// Planar NURBS curve.
class NurbsCurve {
 public:
  NurbsCurve() = default;
  NurbsCurve(KnotVector kv, std::vector<Vec2> points, std::vector<double> weights);

  const KnotVector& knots() const noexcept { return kv_; }
  std::span<const Vec2> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }

  Vec2 point(double xi) const;
  /// Point and first derivative dF/dxi.
  std::pair<Vec2, Vec2> point_and_tangent(double xi) const;

 private:
  KnotVector kv_;
  std::vector<Vec2> points_;
  std::vector<double> weights_;
};

/// Exact circular arc from angle theta0 to theta1 (counter-clockwise), built
/// from quadratic rational segments spanning at most 90 degrees each.
NurbsCurve make_circular_arc(double radius, double theta0, double theta1, const Vec2& center = Vec2::Zero());

/// Straight segment with uniform-speed parametrization, represented at the
/// given degree with unit weights.
NurbsCurve make_line(const Vec2& a, const Vec2& b, int degree = 2);

enum class Side : int { South = 0, East = 1, North = 2, West = 3 };

const char* side_name(Side s);

/// Geometry map sample: F(xi, eta), its Jacobian d(x,y)/d(xi,eta) and det.
struct MapSample {
  Vec2 point;
  Mat2 jacobian;
  double det = 0.0;
};

/// Tensor-product NURBS surface in the plane.
class NurbsPatch {
 public:
  NurbsPatch() = default;
  NurbsPatch(KnotVector ku, KnotVector kv, std::vector<Vec2> net, std::vector<double> weights);

  /// Surface swept linearly between two curves with identical knot vectors;
  /// `bottom` becomes the South side and `top` the North side.
  static NurbsPatch ruled(const NurbsCurve& bottom, const NurbsCurve& top);

  const KnotVector& knots_u() const noexcept { return ku_; }
  const KnotVector& knots_v() const noexcept { return kv_; }
  int n_u() const noexcept { return ku_.dimension(); }
  int n_v() const noexcept { return kv_.dimension(); }
  const Vec2& control(int i, int j) const { return net_[i + n_u() * j]; }
  double weight(int i, int j) const { return weights_[i + n_u() * j]; }
  std::span<const Vec2> control_net() const noexcept { return net_; }
  std::span<const double> weights() const noexcept { return weights_; }

  MapSample eval(double xi, double eta) const;
  Vec2 point(double xi, double eta) const { return eval(xi, eta).point; }

  /// Restriction to a side, oriented along increasing u (South/North) or
  /// increasing v (West/East).
  NurbsCurve boundary(Side side) const;

  /// Axis-aligned bounding box of the control net (contains the patch).
  std::pair<Vec2, Vec2> bounding_box() const;

 private:
  KnotVector ku_, kv_;
  std::vector<Vec2> net_;
  std::vector<double> weights_;
};

MapSample surface_map_eval(const NurbsPatch& patch, double xi, double eta);

/// Knot insertion. Geometry is preserved exactly; inserting a knot beyond
/// multiplicity p throws DomainError.
KnotVector h_refine(const KnotVector& kv, std::span<const double> insert);
NurbsCurve h_refine(const NurbsCurve& curve, std::span<const double> insert);
NurbsPatch h_refine(const NurbsPatch& patch, std::span<const double> insert_u, std::span<const double> insert_v);

/// Interior knots that split every span of `kv` into `factor` equal parts.
std::vector<double> uniform_insertions(const KnotVector& kv, int factor);

struct InverseMapResult {
  Vec2 param = Vec2::Zero();
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton inversion of the patch map (step halving whenever the
/// residual grows, at most `max_iter` steps). The iterate is clamped to the
/// unit square. Non-convergence is reported, not thrown.
InverseMapResult inverse_map(const NurbsPatch& patch, const Vec2& point, const Vec2& guess = Vec2(0.5, 0.5),
                             double tol = 1e-12, int max_iter = 50);

}  // namespace iga
