#pragma once

// Multipatch domains and globally numbered scalar spline spaces over them.
//
// Solution spaces are not isoparametric: every patch carries its own B-spline
// space on the reference square, composed with the fixed NURBS geometry map.
// Inter-patch C0 gluing, homogeneous Dirichlet elimination and anti-periodic
// identification are all expressed as constraints on local DoFs; the global
// numbering is recomputed from the full constraint list, so applying a
// constraint twice is harmless.

#include "iga/splines.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iga {

enum class BoundaryTag { Dirichlet, AntiperiodicLeft, AntiperiodicRight, Airgap, Interior };

const char* tag_name(BoundaryTag t);
BoundaryTag tag_from_name(const std::string& s);
Side side_from_name(const std::string& s);

struct SideRef {
  int patch = 0;
  Side side = Side::South;
  auto operator<=>(const SideRef&) const = default;
};

struct PatchInterface {
  SideRef a;
  SideRef b;
  bool reversed = false;  // side b runs opposite to side a
};

class MultiPatchDomain {
 public:
  int add_patch(NurbsPatch patch);
  void add_interface(const PatchInterface& iface);
  void set_tag(int patch, Side side, BoundaryTag tag);

  /// Finds every pair of coincident patch sides and records it as an
  /// interface, with the orientation flag taken from the endpoint match.
  void detect_interfaces(double tol = 1e-10);

  /// Each side appears at most once among interfaces and tags; glued sides
  /// coincide geometrically. Throws MismatchError otherwise.
  void validate(double tol = 1e-10) const;

  int num_patches() const { return static_cast<int>(patches_.size()); }
  const NurbsPatch& patch(int p) const { return patches_.at(p); }
  std::span<const NurbsPatch> patches() const { return patches_; }
  std::span<const PatchInterface> interfaces() const { return interfaces_; }
  const std::map<SideRef, BoundaryTag>& tags() const { return tags_; }
  std::optional<BoundaryTag> tag(SideRef s) const;
  std::vector<SideRef> sides_with(BoundaryTag tag) const;

 private:
  std::vector<NurbsPatch> patches_;
  std::vector<PatchInterface> interfaces_;
  std::map<SideRef, BoundaryTag> tags_;
};

/// Scalar B-spline space on one patch's reference square.
struct PatchSpace {
  KnotVector u, v;

  int n_u() const { return u.dimension(); }
  int n_v() const { return v.dimension(); }
  int size() const { return n_u() * n_v(); }
  int index(int i, int j) const { return i + n_u() * j; }
  const KnotVector& side_knots(Side s) const { return (s == Side::South || s == Side::North) ? u : v; }
  /// Local indices along a side, ordered by increasing side parameter.
  std::vector<int> side_indices(Side s) const;
};

/// Degree-p space whose elements split every geometry span of the patch into
/// `subdivisions` equal parts (so solution element boundaries always contain
/// the geometry knot lines).
PatchSpace make_patch_space(const NurbsPatch& geometry, int degree, int subdivisions);

struct DofMap {
  int global = -1;     // -1: eliminated (homogeneous Dirichlet)
  double sign = 1.0;   // -1 only for anti-periodic slaves
};

class DiscreteSpace {
 public:
  /// Identification value(a) = sign * value(b) between flat local indices.
  struct Link {
    int a = 0;
    int b = 0;
    double sign = 1.0;
    bool antiperiodic = false;
  };

  DiscreteSpace() = default;
  explicit DiscreteSpace(std::vector<PatchSpace> spaces);

  int num_patches() const { return static_cast<int>(spaces_.size()); }
  const PatchSpace& patch_space(int p) const { return spaces_.at(p); }
  int offset(int p) const { return offsets_.at(p); }
  int num_local() const { return offsets_.back(); }
  int num_dofs() const { return n_dofs_; }

  const DofMap& map(int patch, int local) const { return map_[offsets_[patch] + local]; }
  const DofMap& map_flat(int flat) const { return map_[flat]; }

  std::span<const Link> links() const { return links_; }
  std::span<const int> eliminated() const { return eliminated_; }

  /// New space with additional constraints; numbering is recomputed.
  DiscreteSpace with_constraints(std::vector<Link> links, std::vector<int> eliminated) const;
  DiscreteSpace without_constraints() const { return DiscreteSpace(spaces_); }

  /// Counts per constraint kind, one per line.
  std::string constraint_report() const;

  bool same_numbering(const DiscreteSpace& other) const;

 private:
  void renumber();

  std::vector<PatchSpace> spaces_;
  std::vector<int> offsets_{0};
  std::vector<Link> links_;
  std::vector<int> eliminated_;
  std::vector<DofMap> map_;
  int n_dofs_ = 0;
  int n_conflicts_ = 0;
};

/// Identifies DoFs on glued sides. Throws MismatchError naming the patch pair
/// when the two traces are not conforming.
DiscreteSpace glue_c0(const MultiPatchDomain& domain, const DiscreteSpace& space);

/// Eliminates DoFs supported on sides tagged Dirichlet.
DiscreteSpace apply_dirichlet(const DiscreteSpace& space, const MultiPatchDomain& domain);

/// Identifies each AntiperiodicLeft DoF with its AntiperiodicRight partner
/// (sign -1). Partners are found geometrically: right-side points rotated by
/// `rotation` radians about the origin must land on the left side.
DiscreteSpace apply_antiperiodic(const DiscreteSpace& space, const MultiPatchDomain& domain, double rotation);

struct SpaceOptions {
  int degree = 2;
  int subdivisions = 1;
  std::optional<double> antiperiodic_rotation;  // set to pair Left/Right sides
  bool dirichlet = true;
};

/// Per-patch spaces + gluing + optional anti-periodicity + Dirichlet.
DiscreteSpace build_space(const MultiPatchDomain& domain, const SpaceOptions& opt);

}  // namespace iga
