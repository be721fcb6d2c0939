#include "iga/multipatch.hpp"

#include "iga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace iga {

namespace {

constexpr int kEdgeSamples = 11;

std::string side_str(SideRef s) {
  std::ostringstream os;
  os << "patch " << s.patch << " (" << side_name(s.side) << ")";
  return os.str();
}

// Max distance between two edge curves sampled at matching parameters.
double edge_distance(const NurbsCurve& a, const NurbsCurve& b, bool reversed,
                     const Eigen::Rotation2Dd& rot = Eigen::Rotation2Dd(0.0)) {
  double d = 0.0;
  for (int s = 0; s < kEdgeSamples; ++s) {
    const double t = static_cast<double>(s) / (kEdgeSamples - 1);
    const Vec2 pa = rot * a.point(t);
    const Vec2 pb = b.point(reversed ? 1.0 - t : t);
    d = std::max(d, (pa - pb).norm());
  }
  return d;
}

}  // namespace

const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::AntiperiodicLeft: return "antiperiodic_left";
    case BoundaryTag::AntiperiodicRight: return "antiperiodic_right";
    case BoundaryTag::Airgap: return "airgap";
    case BoundaryTag::Interior: return "interior";
  }
  return "?";
}

BoundaryTag tag_from_name(const std::string& s) {
  for (BoundaryTag t : {BoundaryTag::Dirichlet, BoundaryTag::AntiperiodicLeft, BoundaryTag::AntiperiodicRight,
                        BoundaryTag::Airgap, BoundaryTag::Interior}) {
    if (s == tag_name(t)) return t;
  }
  throw DomainError("unknown boundary tag '" + s + "'");
}

Side side_from_name(const std::string& s) {
  for (Side x : {Side::South, Side::East, Side::North, Side::West}) {
    if (s == side_name(x)) return x;
  }
  throw DomainError("unknown side '" + s + "'");
}

// ----------------------------------------------------------- MultiPatchDomain

int MultiPatchDomain::add_patch(NurbsPatch patch) {
  patches_.push_back(std::move(patch));
  return num_patches() - 1;
}

void MultiPatchDomain::add_interface(const PatchInterface& iface) { interfaces_.push_back(iface); }

void MultiPatchDomain::set_tag(int patch, Side side, BoundaryTag tag) { tags_[SideRef{patch, side}] = tag; }

std::optional<BoundaryTag> MultiPatchDomain::tag(SideRef s) const {
  const auto it = tags_.find(s);
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

std::vector<SideRef> MultiPatchDomain::sides_with(BoundaryTag tag) const {
  std::vector<SideRef> out;
  for (const auto& [s, t] : tags_) {
    if (t == tag) out.push_back(s);
  }
  return out;
}

void MultiPatchDomain::detect_interfaces(double tol) {
  std::set<SideRef> used;
  for (const auto& i : interfaces_) {
    used.insert(i.a);
    used.insert(i.b);
  }
  const std::array<Side, 4> sides = {Side::South, Side::East, Side::North, Side::West};
  std::vector<std::pair<SideRef, NurbsCurve>> edges;
  for (int p = 0; p < num_patches(); ++p) {
    for (Side s : sides) edges.emplace_back(SideRef{p, s}, patches_[p].boundary(s));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (used.count(edges[i].first)) continue;
    const NurbsCurve& ca = edges[i].second;
    const Vec2 a0 = ca.point(0.0), a1 = ca.point(1.0);
    const double scale = std::max(1.0, (a1 - a0).norm());
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      if (edges[j].first.patch == edges[i].first.patch || used.count(edges[j].first)) continue;
      const NurbsCurve& cb = edges[j].second;
      const Vec2 b0 = cb.point(0.0), b1 = cb.point(1.0);
      bool reversed;
      if ((a0 - b0).norm() < tol * scale && (a1 - b1).norm() < tol * scale) {
        reversed = false;
      } else if ((a0 - b1).norm() < tol * scale && (a1 - b0).norm() < tol * scale) {
        reversed = true;
      } else {
        continue;
      }
      if (edge_distance(ca, cb, reversed) > tol * scale) continue;
      interfaces_.push_back(PatchInterface{edges[i].first, edges[j].first, reversed});
      used.insert(edges[i].first);
      used.insert(edges[j].first);
      break;
    }
  }
}

void MultiPatchDomain::validate(double tol) const {
  std::set<SideRef> seen;
  auto claim = [&](SideRef s) {
    if (s.patch < 0 || s.patch >= num_patches()) throw MismatchError("side refers to unknown " + side_str(s));
    if (!seen.insert(s).second) throw MismatchError(side_str(s) + " is used more than once");
  };
  for (const auto& i : interfaces_) {
    claim(i.a);
    claim(i.b);
    const NurbsCurve ca = patches_[i.a.patch].boundary(i.a.side);
    const NurbsCurve cb = patches_[i.b.patch].boundary(i.b.side);
    if (edge_distance(ca, cb, i.reversed) > tol * std::max(1.0, (ca.point(1) - ca.point(0)).norm())) {
      throw MismatchError("glued sides " + side_str(i.a) + " and " + side_str(i.b) + " do not coincide");
    }
  }
  for (const auto& [s, t] : tags_) claim(s);
}

// ----------------------------------------------------------------- PatchSpace

std::vector<int> PatchSpace::side_indices(Side s) const {
  std::vector<int> out;
  switch (s) {
    case Side::South:
      for (int i = 0; i < n_u(); ++i) out.push_back(index(i, 0));
      break;
    case Side::North:
      for (int i = 0; i < n_u(); ++i) out.push_back(index(i, n_v() - 1));
      break;
    case Side::West:
      for (int j = 0; j < n_v(); ++j) out.push_back(index(0, j));
      break;
    case Side::East:
      for (int j = 0; j < n_v(); ++j) out.push_back(index(n_u() - 1, j));
      break;
  }
  return out;
}

PatchSpace make_patch_space(const NurbsPatch& geometry, int degree, int subdivisions) {
  if (degree < 1) throw DomainError("solution degree must be at least 1");
  auto build = [&](const KnotVector& g) {
    const auto b = g.breakpoints();
    std::vector<double> breaks;
    for (std::size_t e = 0; e + 1 < b.size(); ++e) {
      for (int s = 0; s < subdivisions; ++s) breaks.push_back(b[e] + (b[e + 1] - b[e]) * s / subdivisions);
    }
    breaks.push_back(1.0);
    return KnotVector::from_breakpoints(degree, breaks);
  };
  if (subdivisions < 1) throw DomainError("subdivisions must be at least 1");
  return PatchSpace{build(geometry.knots_u()), build(geometry.knots_v())};
}

// -------------------------------------------------------------- DiscreteSpace

DiscreteSpace::DiscreteSpace(std::vector<PatchSpace> spaces) : spaces_(std::move(spaces)) {
  offsets_.assign(1, 0);
  for (const auto& s : spaces_) offsets_.push_back(offsets_.back() + s.size());
  renumber();
}

DiscreteSpace DiscreteSpace::with_constraints(std::vector<Link> links, std::vector<int> eliminated) const {
  DiscreteSpace out = *this;
  out.links_.insert(out.links_.end(), links.begin(), links.end());
  out.eliminated_.insert(out.eliminated_.end(), eliminated.begin(), eliminated.end());
  std::sort(out.eliminated_.begin(), out.eliminated_.end());
  out.eliminated_.erase(std::unique(out.eliminated_.begin(), out.eliminated_.end()), out.eliminated_.end());
  out.renumber();
  return out;
}

void DiscreteSpace::renumber() {
  const int n = num_local();
  // Union-find with parity: value(x) = parity[x] * value(parent[x]).
  std::vector<int> parent(n);
  std::vector<double> parity(n, 1.0);
  std::vector<char> zero(n, 0);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    double s = 1.0;
    int r = x;
    while (parent[r] != r) {
      s *= parity[r];
      r = parent[r];
    }
    // path compression
    double acc = s;
    int y = x;
    while (parent[y] != y) {
      const int next = parent[y];
      const double py = parity[y];
      parent[y] = r;
      parity[y] = acc;
      acc *= py;
      y = next;
    }
    return std::pair<int, double>{r, s};
  };
  n_conflicts_ = 0;
  for (const Link& l : links_) {
    const auto [ra, sa] = find(l.a);
    const auto [rb, sb] = find(l.b);
    if (ra == rb) {
      if (sa != l.sign * sb) {
        zero[ra] = 1;  // x = -x forces zero
        ++n_conflicts_;
      }
      continue;
    }
    parent[ra] = rb;
    parity[ra] = sa * l.sign * sb;
    zero[rb] = zero[rb] || zero[ra];
  }
  for (int e : eliminated_) zero[find(e).first] = 1;

  // Master of each class is its smallest local index (sign +1).
  std::vector<int> number(n, -1);
  std::vector<double> master_sign(n, 0.0);
  map_.assign(n, DofMap{});
  n_dofs_ = 0;
  for (int x = 0; x < n; ++x) {
    const auto [r, s] = find(x);
    if (zero[r]) continue;
    if (number[r] < 0) {
      number[r] = n_dofs_++;
      master_sign[r] = s;
    }
    map_[x] = DofMap{number[r], s * master_sign[r]};
  }
}

std::string DiscreteSpace::constraint_report() const {
  int glue = 0, anti = 0;
  for (const Link& l : links_) (l.antiperiodic ? anti : glue)++;
  std::ostringstream os;
  os << "local_dofs " << num_local() << "\n"
     << "global_dofs " << num_dofs() << "\n"
     << "c0_identifications " << glue << "\n"
     << "antiperiodic_identifications " << anti << "\n"
     << "dirichlet_eliminated " << eliminated_.size() << "\n"
     << "sign_conflicts " << n_conflicts_ << "\n";
  return os.str();
}

bool DiscreteSpace::same_numbering(const DiscreteSpace& other) const {
  if (map_.size() != other.map_.size() || n_dofs_ != other.n_dofs_) return false;
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i].global != other.map_[i].global || map_[i].sign != other.map_[i].sign) return false;
  }
  return true;
}

// ------------------------------------------------------------ constraint ops

DiscreteSpace glue_c0(const MultiPatchDomain& domain, const DiscreteSpace& space) {
  if (space.num_patches() != domain.num_patches()) throw MismatchError("space/domain patch count mismatch");
  std::vector<DiscreteSpace::Link> links;
  for (const PatchInterface& i : domain.interfaces()) {
    const PatchSpace& sa = space.patch_space(i.a.patch);
    const PatchSpace& sb = space.patch_space(i.b.patch);
    const KnotVector& ka = sa.side_knots(i.a.side);
    const KnotVector kb = i.reversed ? sb.side_knots(i.b.side).reversed() : sb.side_knots(i.b.side);
    const NurbsCurve ca = domain.patch(i.a.patch).boundary(i.a.side);
    const NurbsCurve cb = domain.patch(i.b.patch).boundary(i.b.side);
    const double scale = std::max(1.0, (ca.point(1) - ca.point(0)).norm());
    if (!(ka == kb) || edge_distance(ca, cb, i.reversed) > 1e-10 * scale) {
      throw MismatchError("non-conforming glued interface between " + side_str(i.a) + " and " + side_str(i.b));
    }
    auto la = sa.side_indices(i.a.side);
    auto lb = sb.side_indices(i.b.side);
    if (i.reversed) std::reverse(lb.begin(), lb.end());
    for (std::size_t k = 0; k < la.size(); ++k) {
      links.push_back({space.offset(i.a.patch) + la[k], space.offset(i.b.patch) + lb[k], 1.0, false});
    }
  }
  return space.with_constraints(std::move(links), {});
}

DiscreteSpace apply_dirichlet(const DiscreteSpace& space, const MultiPatchDomain& domain) {
  std::vector<int> elim;
  for (const SideRef& s : domain.sides_with(BoundaryTag::Dirichlet)) {
    for (int l : space.patch_space(s.patch).side_indices(s.side)) elim.push_back(space.offset(s.patch) + l);
  }
  return space.with_constraints({}, std::move(elim));
}

DiscreteSpace apply_antiperiodic(const DiscreteSpace& space, const MultiPatchDomain& domain, double rotation) {
  const auto lefts = domain.sides_with(BoundaryTag::AntiperiodicLeft);
  const auto rights = domain.sides_with(BoundaryTag::AntiperiodicRight);
  if (lefts.size() != rights.size()) {
    throw MismatchError("anti-periodic sides: left and right counts differ");
  }
  const Eigen::Rotation2Dd rot(rotation);
  std::vector<DiscreteSpace::Link> links;
  std::set<SideRef> matched;
  for (const SideRef& r : rights) {
    const NurbsCurve cr = domain.patch(r.patch).boundary(r.side);
    const Vec2 r0 = rot * cr.point(0.0), r1 = rot * cr.point(1.0);
    const double scale = std::max(1.0, (r1 - r0).norm());
    bool found = false;
    for (const SideRef& l : lefts) {
      if (matched.count(l)) continue;
      const NurbsCurve cl = domain.patch(l.patch).boundary(l.side);
      const Vec2 l0 = cl.point(0.0), l1 = cl.point(1.0);
      bool reversed;
      if ((r0 - l0).norm() < 1e-10 * scale && (r1 - l1).norm() < 1e-10 * scale) {
        reversed = false;
      } else if ((r0 - l1).norm() < 1e-10 * scale && (r1 - l0).norm() < 1e-10 * scale) {
        reversed = true;
      } else {
        continue;
      }
      const KnotVector& kr = space.patch_space(r.patch).side_knots(r.side);
      const KnotVector& kl0 = space.patch_space(l.patch).side_knots(l.side);
      const KnotVector kl = reversed ? kl0.reversed() : kl0;
      if (!(kr == kl) || edge_distance(cr, cl, reversed, rot) > 1e-10 * scale) {
        throw MismatchError("anti-periodic traces of " + side_str(r) + " and " + side_str(l) +
                            " are not conforming under rotation");
      }
      auto ir = space.patch_space(r.patch).side_indices(r.side);
      auto il = space.patch_space(l.patch).side_indices(l.side);
      if (reversed) std::reverse(il.begin(), il.end());
      for (std::size_t k = 0; k < ir.size(); ++k) {
        links.push_back({space.offset(l.patch) + il[k], space.offset(r.patch) + ir[k], -1.0, true});
      }
      matched.insert(l);
      found = true;
      break;
    }
    if (!found) throw MismatchError("no anti-periodic partner for " + side_str(r));
  }
  return space.with_constraints(std::move(links), {});
}

DiscreteSpace build_space(const MultiPatchDomain& domain, const SpaceOptions& opt) {
  std::vector<PatchSpace> spaces;
  for (const NurbsPatch& p : domain.patches()) spaces.push_back(make_patch_space(p, opt.degree, opt.subdivisions));
  DiscreteSpace s = glue_c0(domain, DiscreteSpace(std::move(spaces)));
  if (opt.antiperiodic_rotation) s = apply_antiperiodic(s, domain, *opt.antiperiodic_rotation);
  if (opt.dirichlet) s = apply_dirichlet(s, domain);
  return s;
}

}  // namespace iga
