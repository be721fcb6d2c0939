#include "iga/errors.hpp"
#include "iga/models.hpp"
#include "model_util.hpp"

#include <cmath>
#include <numbers>

namespace iga {

namespace {

constexpr double kPi = std::numbers::pi;

void check_split(double r_split) {
  if (!(r_split > 1.0 && r_split < 2.0)) throw DomainError("split radius must lie strictly between 1 and 2");
}

void tag_ring_side(MultiPatchDomain& d, double r_split) {
  detail::classify_boundaries(d, [&](const NurbsCurve& c) -> std::optional<BoundaryTag> {
    if (detail::on_circle(c, r_split)) return BoundaryTag::Airgap;
    return BoundaryTag::Dirichlet;
  });
}

TwoDomainModel ring_model(double r_split, const std::vector<double>& inner_breaks,
                          const std::vector<double>& outer_breaks) {
  TwoDomainModel m;
  for (std::size_t k = 0; k + 1 < inner_breaks.size(); ++k) {
    m.rt.add_patch(detail::sector(1.0, r_split, inner_breaks[k], inner_breaks[k + 1]));
  }
  for (std::size_t k = 0; k + 1 < outer_breaks.size(); ++k) {
    m.st.add_patch(detail::sector(r_split, 2.0, outer_breaks[k], outer_breaks[k + 1]));
  }
  tag_ring_side(m.rt, r_split);
  tag_ring_side(m.st, r_split);
  m.rt.validate();
  m.st.validate();
  m.mat_rt = MaterialMap::uniform(m.rt.num_patches());
  m.mat_st = MaterialMap::uniform(m.st.num_patches());
  m.interface_radius = r_split;
  return m;
}

}  // namespace

TwoDomainModel build_quarter_ring(double r_split) {
  check_split(r_split);
  return ring_model(r_split, {0.0, kPi / 4, kPi / 2}, {0.0, kPi / 6, kPi / 3, kPi / 2});
}

TwoDomainModel build_conforming_quarter_ring(double r_split) {
  check_split(r_split);
  return ring_model(r_split, {0.0, kPi / 2}, {0.0, kPi / 2});
}

MultiPatchDomain build_glued_quarter_ring(double r_split) {
  check_split(r_split);
  MultiPatchDomain d;
  d.add_patch(detail::sector(1.0, r_split, 0.0, kPi / 2));
  d.add_patch(detail::sector(r_split, 2.0, 0.0, kPi / 2));
  detail::classify_boundaries(d, [](const NurbsCurve&) -> std::optional<BoundaryTag> { return BoundaryTag::Dirichlet; });
  d.validate();
  return d;
}

TwoDomainModel build_full_ring(double r_split, double rotor_offset) {
  check_split(r_split);
  std::vector<double> inner, outer;
  for (int k = 0; k <= 4; ++k) {
    inner.push_back(rotor_offset + k * kPi / 2);
    outer.push_back(k * kPi / 2);
  }
  return ring_model(r_split, inner, outer);
}

double manufactured_rhs(double x, double y) {
  const double x2 = x * x, y2 = y * y;
  return 2.0 * x * (22.0 * x2 * y2 + 21.0 * y2 * y2 - 45.0 * y2 + x2 * x2 - 5.0 * x2 + 4.0);
}

double manufactured_solution(double x, double y) {
  const double s = x * x + y * y;
  return -x * y * y * (s - 1.0) * (s - 4.0);
}

Vec2 manufactured_gradient(double x, double y) {
  const double s = x * x + y * y;
  const double g = (s - 1.0) * (s - 4.0);
  const double dg = 2.0 * s - 5.0;
  return Vec2(-y * y * (g + 2.0 * x * x * dg), -2.0 * x * y * (g + y * y * dg));
}

double manufactured_multiplier(double theta, double radius) {
  const Vec2 p(radius * std::cos(theta), radius * std::sin(theta));
  return -manufactured_gradient(p.x(), p.y()).dot(p);
}

}  // namespace iga
