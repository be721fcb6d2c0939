#pragma once

#include "iga/multipatch.hpp"

#include <numbers>

namespace iga::test {

/// Bilinear rectangle [x0,x1] x [y0,y1], u along x, v along y.
inline NurbsPatch rectangle(double x0, double x1, double y0, double y1) {
  return NurbsPatch::ruled(make_line(Vec2(x0, y0), Vec2(x1, y0), 1), make_line(Vec2(x0, y1), Vec2(x1, y1), 1));
}

/// Annular sector r_in..r_out, theta0..theta1; u counter-clockwise, v inward.
inline NurbsPatch sector(double r_in, double r_out, double theta0, double theta1) {
  return NurbsPatch::ruled(make_circular_arc(r_out, theta0, theta1), make_circular_arc(r_in, theta0, theta1));
}

inline void tag_all(MultiPatchDomain& d, int patch, BoundaryTag tag) {
  for (Side s : {Side::South, Side::East, Side::North, Side::West}) d.set_tag(patch, s, tag);
}

}  // namespace iga::test
