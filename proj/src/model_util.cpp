#include "model_util.hpp"

#include "iga/errors.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace iga::detail {

NurbsPatch oriented(const NurbsCurve& a, const NurbsCurve& b) {
  NurbsPatch p = NurbsPatch::ruled(a, b);
  if (p.eval(0.5, 0.5).det < 0) p = NurbsPatch::ruled(b, a);
  return p;
}

NurbsPatch sector(double r_in, double r_out, double theta0, double theta1) {
  return oriented(make_circular_arc(r_out, theta0, theta1), make_circular_arc(r_in, theta0, theta1));
}

bool on_circle(const NurbsCurve& c, double radius, double rel_tol) {
  for (int s = 0; s <= 8; ++s) {
    if (std::abs(c.point(s / 8.0).norm() - radius) > rel_tol * radius) return false;
  }
  return true;
}

bool on_ray(const NurbsCurve& c, double angle, double tol) {
  const Vec2 dir(std::cos(angle), std::sin(angle));
  for (int s = 0; s <= 8; ++s) {
    const Vec2 p = c.point(s / 8.0);
    const double cross = dir.x() * p.y() - dir.y() * p.x();
    if (std::abs(cross) > tol * std::max(1.0, p.norm()) || p.dot(dir) <= 0) return false;
  }
  return true;
}

void classify_boundaries(MultiPatchDomain& d,
                         const std::function<std::optional<BoundaryTag>(const NurbsCurve&)>& classify) {
  d.detect_interfaces();
  std::set<SideRef> glued;
  for (const PatchInterface& i : d.interfaces()) {
    glued.insert(i.a);
    glued.insert(i.b);
  }
  for (int p = 0; p < d.num_patches(); ++p) {
    for (Side s : {Side::South, Side::East, Side::North, Side::West}) {
      if (glued.count(SideRef{p, s})) continue;
      const auto tag = classify(d.patch(p).boundary(s));
      if (!tag) {
        std::ostringstream os;
        os << "side " << side_name(s) << " of patch " << p << " is neither glued nor on a known boundary";
        throw MismatchError(os.str());
      }
      d.set_tag(p, s, *tag);
    }
  }
}

}  // namespace iga::detail
