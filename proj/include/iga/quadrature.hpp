#pragma once

#include <vector>

namespace iga {

/// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

/// n-point rule, exact for polynomials of degree 2n-1. Throws DomainError for
/// n < 1.
GaussRule gauss_legendre(int n);

/// Tensorized Gauss rule used per element: q points in each direction.
struct QuadratureRule {
  int q = 0;
  GaussRule line;

  explicit QuadratureRule(int points);
  /// Default rule for solution degree p: q = p + 1.
  static QuadratureRule for_degree(int p) { return QuadratureRule(p + 1); }

  int points_per_element() const { return q * q; }
};

}  // namespace iga
