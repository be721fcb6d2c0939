#pragma once

// Galerkin assembly of the 2D magnetostatic problem
//   -div(nu grad A) = J_src + curl-type magnet source
// over a multipatch discrete space. Matrices and vectors are indexed by the
// free (global) DoFs of the space.

#include "iga/linsolve.hpp"
#include "iga/multipatch.hpp"
#include "iga/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace iga {

struct Material {
  std::string region;
  double nu = 1.0;              // reluctivity [m/H]
  double j_src = 0.0;           // axial current density [A/m^2]
  Vec2 h_pm = Vec2::Zero();     // magnet source field strength [A/m]
};

/// One material record per patch.
struct MaterialMap {
  std::vector<Material> patch;

  static MaterialMap uniform(int n_patches, double nu = 1.0);
  /// nu > 0 everywhere; throws DomainError naming the patch.
  void validate(int n_patches) const;
};

/// Quadrature data of one element, point-major (see kernels.hpp).
struct ElementData {
  int patch = 0;
  int eu = 0, ev = 0;           // element indices in u and v
  int nb = 0;                   // functions supported on the element
  int nq = 0;
  std::vector<int> local;       // flat local index per function
  std::vector<double> n, gx, gy;
  std::vector<double> wdet;     // quadrature weight * det J
  std::vector<Vec2> x;          // physical points
  std::vector<Vec2> param;      // (xi, eta)
};

/// Visits every element of every patch in patch order. Throws DomainError
/// naming the patch/element at the first quadrature point with det J <= 0.
void for_each_element(const MultiPatchDomain& domain, const DiscreteSpace& space, const QuadratureRule& quad,
                      const std::function<void(const ElementData&)>& visit);

SpMat assemble_stiffness(const MultiPatchDomain& domain, const DiscreteSpace& space, const MaterialMap& materials,
                         const QuadratureRule& quad);
SpMat assemble_mass(const MultiPatchDomain& domain, const DiscreteSpace& space, const QuadratureRule& quad);
Eigen::VectorXd assemble_current(const MultiPatchDomain& domain, const DiscreteSpace& space,
                                 const MaterialMap& materials, const QuadratureRule& quad);
Eigen::VectorXd assemble_pm(const MultiPatchDomain& domain, const DiscreteSpace& space, const MaterialMap& materials,
                            const QuadratureRule& quad);
/// Right-hand side for a source given as a function of the physical point.
Eigen::VectorXd assemble_load(const MultiPatchDomain& domain, const DiscreteSpace& space,
                              const std::function<double(const Vec2&)>& f, const QuadratureRule& quad);

/// SPD solve of K u = j with residual check.
Eigen::VectorXd solve_reduced(const SpMat& k, const Eigen::VectorXd& j);

/// Per-local-function coefficients (flat local indexing) of a global vector.
Eigen::VectorXd expand_local(const DiscreteSpace& space, const Eigen::VectorXd& u);

}  // namespace iga
