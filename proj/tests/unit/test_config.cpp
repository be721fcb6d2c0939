#include "iga/config.hpp"
#include "iga/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

using namespace iga;

namespace {

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Quantity, UnitsConvertToSi) {
  EXPECT_DOUBLE_EQ(parse_quantity("16 mm", Unit::Length, "x"), 0.016);
  EXPECT_DOUBLE_EQ(parse_quantity("4.47 cm", Unit::Length, "x"), 0.0447);
  EXPECT_DOUBLE_EQ(parse_quantity("0.2", Unit::Length, "x"), 0.2);
  EXPECT_DOUBLE_EQ(parse_quantity("180 deg", Unit::Angle, "x"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_quantity("60 rpm", Unit::Speed, "x"), 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_quantity("0.94 T", Unit::Dimensionless, "x"), 0.94);
  EXPECT_DOUBLE_EQ(parse_quantity("1e-3", Unit::Dimensionless, "x"), 1e-3);
}

TEST(Quantity, ErrorsNameTheField) {
  for (const auto& [text, kind] : std::vector<std::pair<std::string, Unit>>{
           {"16 deg", Unit::Length}, {"16 furlong", Unit::Length}, {"abc", Unit::Angle}, {"1 mm extra", Unit::Length},
           {"nan", Unit::Length}}) {
    try {
      parse_quantity(text, kind, "machine.r_ag");
      FAIL() << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("machine.r_ag"), std::string::npos) << e.what();
    }
  }
}

TEST(Config, DefaultsPerStudy) {
  const RunConfig v = parse_config("study: verify");
  EXPECT_EQ(v.degrees, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(v.levels, (std::vector<int>{4, 8, 16, 32, 64}));
  EXPECT_EQ(v.max_order, 3);
  const RunConfig i = parse_config("study: infsup");
  EXPECT_EQ(i.degrees, (std::vector<int>{2}));
  EXPECT_EQ(i.levels, (std::vector<int>{4, 8, 16, 32}));
  const RunConfig e = parse_config("study: emf\nspeed: 1000 rpm");
  EXPECT_EQ(e.model, ModelKind::Machine);
  EXPECT_EQ(e.symmetry, Symmetry::Antiperiodic);
  EXPECT_EQ(e.max_order, 15);
  EXPECT_NEAR(e.speed, 1000 * 2 * std::numbers::pi / 60, 1e-12);
}

TEST(Config, FullDocument) {
  const RunConfig c = parse_config(R"(
study: solve
model: machine
degrees: [3]
levels: [1, 2]
harmonics: {max_order: 9, symmetry: antiperiodic}
alpha: [0 deg, 10 deg]
coupling: both
dn: {relax: 0.1, tol: 1e-4, max_iter: 50}
quadrature: 5
output: somewhere
machine:
  r_ag: 44.6 mm
  n_turns: 10
)");
  EXPECT_EQ(c.study, Study::Solve);
  EXPECT_EQ(c.degrees, (std::vector<int>{3}));
  EXPECT_EQ(c.max_order, 9);
  ASSERT_EQ(c.alpha.size(), 2u);
  EXPECT_NEAR(c.alpha[1], 10 * std::numbers::pi / 180, 1e-15);
  EXPECT_EQ(c.coupling, Coupling::Both);
  EXPECT_DOUBLE_EQ(c.dn.relax, 0.1);
  EXPECT_EQ(c.dn.max_iter, 50);
  EXPECT_EQ(c.quadrature, 5);
  EXPECT_NEAR(c.machine.r_ag, 0.0446, 1e-15);
  EXPECT_EQ(c.machine.n_turns, 10);
  EXPECT_NEAR(c.machine.r_st_i, 45e-3, 1e-15);
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_NE(error_of("study: verify\nlevles: [2]").find("levles"), std::string::npos);
  EXPECT_NE(error_of("study: verify\nharmonics: {order: 2}").find("harmonics.order"), std::string::npos);
  EXPECT_NE(error_of("study: simulate").find("study"), std::string::npos);
  EXPECT_NE(error_of("levels: [2]").find("study"), std::string::npos);
  EXPECT_NE(error_of("study: verify\ndegrees: [0]").find("degrees"), std::string::npos);
  EXPECT_NE(error_of("study: solve\nmodel: machine\ndn: {relax: 1.5}").find("dn.relax"), std::string::npos);
  EXPECT_NE(error_of("study: emf").find("speed"), std::string::npos);
  EXPECT_NE(error_of("study: emf\nspeed: 3 mm").find("speed"), std::string::npos);
  EXPECT_NE(error_of("study: emf\nspeed: 1000 rpm\nsamples: 7").find("samples"), std::string::npos);
  EXPECT_NE(error_of("study: solve\nmodel: machine\nmachine: {r_ag: 46 mm}").find("machine"), std::string::npos);
  EXPECT_NE(error_of("study: solve\nmodel: machine\nmachine: {r_ag: 44.7 deg}").find("machine.r_ag"),
            std::string::npos);
  EXPECT_NE(error_of("study: verify\nalpha: [0.1]").find("alpha"), std::string::npos);
  EXPECT_NE(error_of("study: [unclosed").find("YAML"), std::string::npos);
  EXPECT_NE(error_of("").find("empty"), std::string::npos);
  EXPECT_NE(error_of("study: solve\nmodel_file: /nonexistent/m.yaml").find("model_file"), std::string::npos);
}

TEST(Config, ShippedConfigsLoad) {
  const std::filesystem::path dir = std::filesystem::path(IGA_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().filename() == "machine.yaml") continue;
    EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 4);
  const RunConfig emf = load_config((dir / "emf.yaml").string());
  EXPECT_NEAR(emf.machine.skew, 0.52 * std::numbers::pi / 180, 1e-15);
  EXPECT_NEAR(emf.machine.l4, 8.2e-3, 1e-15);
  const MachineParams m = parse_machine("machine:\n  d1: 18 mm\n");
  EXPECT_NEAR(m.d1, 0.018, 1e-15);
  EXPECT_NEAR(m.d2, 7e-3, 1e-15);
}
