#include "fixtures.hpp"
#include "iga/errors.hpp"
#include "iga/multipatch.hpp"
#include "iga/patch_io.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace iga;
using iga::test::rectangle;
using iga::test::sector;

namespace {

MultiPatchDomain two_squares(bool flip_second = false) {
  MultiPatchDomain d;
  d.add_patch(rectangle(0, 1, 0, 1));
  // flipped: u runs from x = 2 to x = 1 and v from y = 1 to y = 0
  d.add_patch(flip_second ? rectangle(2, 1, 1, 0) : rectangle(1, 2, 0, 1));
  d.detect_interfaces();
  return d;
}

}  // namespace

TEST(MultiPatch, DetectsSharedSide) {
  const MultiPatchDomain d = two_squares();
  ASSERT_EQ(d.interfaces().size(), 1u);
  const PatchInterface& i = d.interfaces()[0];
  EXPECT_EQ(i.a.patch, 0);
  EXPECT_EQ(i.a.side, Side::East);
  EXPECT_EQ(i.b.patch, 1);
  EXPECT_EQ(i.b.side, Side::West);
  EXPECT_FALSE(i.reversed);

  const MultiPatchDomain f = two_squares(true);
  ASSERT_EQ(f.interfaces().size(), 1u);
  EXPECT_EQ(f.interfaces()[0].b.side, Side::East);
  EXPECT_TRUE(f.interfaces()[0].reversed);
}

TEST(MultiPatch, GluedDofCounts) {
  for (bool flip : {false, true}) {
    MultiPatchDomain d = two_squares(flip);
    SpaceOptions opt;
    opt.degree = 2;
    opt.subdivisions = 2;
    opt.dirichlet = false;
    // 4 x 4 functions per patch, 4 shared along the interface
    EXPECT_EQ(build_space(d, opt).num_dofs(), 28);
    for (int p = 0; p < 2; ++p) {
      for (Side s : {Side::South, Side::North}) d.set_tag(p, s, BoundaryTag::Dirichlet);
    }
    d.set_tag(0, Side::West, BoundaryTag::Dirichlet);
    d.set_tag(1, flip ? Side::West : Side::East, BoundaryTag::Dirichlet);
    d.validate();
    opt.dirichlet = true;
    // the C0-glued space is 7 x 4; boundary rows and columns removed
    EXPECT_EQ(build_space(d, opt).num_dofs(), 5 * 2);
  }
}

TEST(MultiPatch, GluedFunctionsAgreeAcrossInterface) {
  const MultiPatchDomain d = two_squares(true);
  SpaceOptions opt;
  opt.degree = 3;
  opt.subdivisions = 3;
  opt.dirichlet = false;
  const DiscreteSpace s = build_space(d, opt);
  // every local function on patch 0's east side shares its global index with
  // the mirrored function on patch 1's east side
  const PatchSpace& a = s.patch_space(0);
  const PatchSpace& b = s.patch_space(1);
  const auto ia = a.side_indices(Side::East);
  const auto ib = b.side_indices(Side::East);
  ASSERT_EQ(ia.size(), ib.size());
  for (std::size_t k = 0; k < ia.size(); ++k) {
    EXPECT_EQ(s.map(0, ia[k]).global, s.map(1, ib[ib.size() - 1 - k]).global);
    EXPECT_EQ(s.map(1, ib[k]).sign, 1.0);
  }
}

TEST(MultiPatch, NonConformingGlueThrows) {
  const MultiPatchDomain d = two_squares();
  const DiscreteSpace s(
      {make_patch_space(d.patch(0), 2, 2), make_patch_space(d.patch(1), 2, 3)});
  EXPECT_THROW(glue_c0(d, s), MismatchError);
}

TEST(MultiPatch, ValidateRejectsDoubleUseAndGaps) {
  MultiPatchDomain d = two_squares();
  d.set_tag(0, Side::East, BoundaryTag::Dirichlet);
  EXPECT_THROW(d.validate(), MismatchError);

  MultiPatchDomain g;
  g.add_patch(rectangle(0, 1, 0, 1));
  g.add_patch(rectangle(1.1, 2, 0, 1));
  g.add_interface({{0, Side::East}, {1, Side::West}, false});
  EXPECT_THROW(g.validate(), MismatchError);
}

TEST(MultiPatch, AntiperiodicIdentification) {
  // one sector 0..90 degrees: theta = 0 side (West) pairs with theta = 90 (East)
  MultiPatchDomain d;
  d.add_patch(sector(1.0, 2.0, 0.0, std::numbers::pi / 2));
  d.set_tag(0, Side::West, BoundaryTag::AntiperiodicRight);
  d.set_tag(0, Side::East, BoundaryTag::AntiperiodicLeft);
  d.set_tag(0, Side::South, BoundaryTag::Dirichlet);
  d.set_tag(0, Side::North, BoundaryTag::Dirichlet);
  d.validate();
  SpaceOptions opt;
  opt.degree = 2;
  opt.subdivisions = 4;
  opt.antiperiodic_rotation = std::numbers::pi / 2;
  const DiscreteSpace s = build_space(d, opt);
  const PatchSpace& ps = s.patch_space(0);
  EXPECT_EQ(ps.n_u(), 6);
  // 6 x 6 local, West and East identified (6), then North/South rows removed
  EXPECT_EQ(s.num_dofs(), (6 - 1) * (6 - 2));
  int anti = 0;
  for (const auto& l : s.links()) {
    if (l.antiperiodic) {
      ++anti;
      EXPECT_EQ(l.sign, -1.0);
    }
  }
  EXPECT_EQ(anti, 6);
  // interior pairs carry opposite signs on the same global DoF
  const auto w = ps.side_indices(Side::West);
  const auto e = ps.side_indices(Side::East);
  for (std::size_t k = 1; k + 1 < w.size(); ++k) {
    const DofMap& mw = s.map(0, w[k]);
    const DofMap& me = s.map(0, e[k]);
    EXPECT_EQ(mw.global, me.global);
    EXPECT_EQ(mw.sign * me.sign, -1.0);
  }
  opt.antiperiodic_rotation = 1.0;
  EXPECT_THROW(build_space(d, opt), MismatchError);
}

TEST(MultiPatch, ConstraintsAreIdempotent) {
  MultiPatchDomain d = two_squares();
  SpaceOptions opt;
  opt.dirichlet = false;
  const DiscreteSpace s = build_space(d, opt);
  const DiscreteSpace t = glue_c0(d, s);
  EXPECT_EQ(t.num_dofs(), s.num_dofs());
  EXPECT_TRUE(t.same_numbering(s));
}

TEST(MultiPatch, SideAndTagNames) {
  for (Side s : {Side::South, Side::East, Side::North, Side::West}) EXPECT_EQ(side_from_name(side_name(s)), s);
  for (BoundaryTag t : {BoundaryTag::Dirichlet, BoundaryTag::AntiperiodicLeft, BoundaryTag::AntiperiodicRight,
                        BoundaryTag::Airgap, BoundaryTag::Interior}) {
    EXPECT_EQ(tag_from_name(tag_name(t)), t);
  }
  EXPECT_THROW(side_from_name("up"), DomainError);
  EXPECT_THROW(tag_from_name("neumann"), DomainError);
}

TEST(PatchIo, JsonRoundTrip) {
  MultiPatchDomain d;
  d.add_patch(sector(1.0, 1.5, 0.0, 1.2));
  d.add_patch(sector(1.5, 2.0, 0.0, 1.2));
  d.detect_interfaces();
  d.set_tag(0, Side::North, BoundaryTag::Dirichlet);
  d.set_tag(1, Side::South, BoundaryTag::Airgap);
  const std::string text = domain_to_json(d, {"iron", "air"});
  std::vector<std::string> regions;
  const MultiPatchDomain r = domain_from_json(text, &regions);
  ASSERT_EQ(r.num_patches(), 2);
  EXPECT_EQ(regions, (std::vector<std::string>{"iron", "air"}));
  EXPECT_EQ(r.interfaces().size(), 1u);
  EXPECT_EQ(r.tags(), d.tags());
  for (int p = 0; p < 2; ++p) {
    EXPECT_EQ(r.patch(p).knots_u(), d.patch(p).knots_u());
    for (double xi : {0.0, 0.3, 1.0}) {
      EXPECT_LT((r.patch(p).point(xi, 0.6) - d.patch(p).point(xi, 0.6)).norm(), 1e-15);
    }
  }
  EXPECT_EQ(domain_to_json(r, regions), text);
}

TEST(PatchIo, MalformedInputThrows) {
  EXPECT_THROW(domain_from_json("{\"format\": \"other\"}"), DomainError);
  EXPECT_THROW(domain_from_json("not json"), DomainError);
  EXPECT_THROW(domain_from_json(R"({"format": "igamach-patches", "version": 1,
    "patches": [{"degree": [1], "knots_u": [0,0,1,1], "knots_v": [0,0,1,1],
                 "control_points": [[0,0],[1,0],[0,1],[1,1]], "weights": [1,1,1,1]}]})"),
               DomainError);
}
