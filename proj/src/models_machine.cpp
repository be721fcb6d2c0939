#include "iga/errors.hpp"
#include "iga/models.hpp"
#include "iga/quadrature.hpp"
#include "model_util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iga {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("machine parameters: " + what);
}

Vec2 rotate(const Vec2& p, double a) { return Eigen::Rotation2Dd(a) * p; }
Vec2 polar(double r, double a) { return Vec2(r * std::cos(a), r * std::sin(a)); }

}  // namespace

double MachineParams::pole_pitch() const { return 2.0 * std::numbers::pi / poles; }

void MachineParams::validate() const {
  require(poles >= 2 && poles % 2 == 0, "poles must be a positive even number");
  require(slots_per_pole == 6, "the winding layout is defined for 6 slots per pole");
  for (double v : {r_rt_i, r_rt_o, d1, d2, d3, r_st_i, r_st_o, l1, l2, l3, l4, r_ag, axial_length}) {
    require(v > 0, "all lengths must be positive");
  }
  require(n_turns > 0, "n_turns must be positive");
  require(mu_r_fe > 0 && mu_r_cu > 0 && mu_r_pm > 0, "relative permeabilities must be positive");
  require(r_rt_o < r_ag && r_ag < r_st_i, "need r_rt_o < r_ag < r_st_i");
  const double half = 0.5 * pole_pitch();
  const double x0 = r_rt_o - d3 - d2;
  require(x0 > r_rt_i, "magnet reaches the rotor bore (r_rt_o - d3 - d2 <= r_rt_i)");
  require(std::atan2(0.5 * d1, x0) < half, "magnet wider than the pole");
  require(std::hypot(r_rt_o - d3, 0.5 * d1) < r_rt_o, "magnet corner outside the rotor");
  require(delta1 > 0 && delta1 < half, "delta1 must lie in (0, pole pitch / 2)");
  require(delta2 > 0 && 0.5 * delta2 < half, "delta2 must lie in (0, pole pitch)");
  require(std::atan2(0.5 * d1, r_rt_o - d3) < 0.5 * delta2, "pole shoe narrower than the magnet");
  const double slot_pitch = pole_pitch() / slots_per_pole;
  require(delta5 > 0 && delta5 < delta4 && delta4 < delta3 && delta3 < slot_pitch,
          "need 0 < delta5 < delta4 < delta3 < slot pitch");
  require(r_st_i + l1 + l2 + l3 + l4 < r_st_o, "slot deeper than the stator");
}

Vec2 magnet_excitation(const MachineParams& params) {
  const double h = params.b_r / (kMu0 * params.mu_r_pm);
  const double axis = 0.5 * params.pole_pitch();
  return h * Vec2(std::cos(axis), std::sin(axis));
}

std::vector<double> winding_excitation(const MachineModel& model, const std::array<double, 3>& currents) {
  std::vector<double> j(model.domains.st.num_patches(), 0.0);
  for (const CoilSide& c : model.coils) {
    const double jd = model.params.n_turns * currents[c.phase] * c.polarity / c.area;
    for (int p : c.patches) j[p] = jd;
  }
  return j;
}

MachineModel build_pmsm_pole(const MachineParams& prm) {
  prm.validate();
  MachineModel m;
  m.params = prm;
  if (prm.skew != 0.0) {
    m.warnings.push_back("skew angle is ignored by the 2D model");
  }
  const double tau = prm.pole_pitch();
  const double half = 0.5 * tau;
  const double nu0 = 1.0 / kMu0;

  // ---- rotor, built in the pole frame (x along the pole axis) then rotated
  const double x0 = prm.r_rt_o - prm.d3 - prm.d2;
  const double x1 = prm.r_rt_o - prm.d3;
  const double w = 0.5 * prm.d1;
  auto g = [&](const Vec2& p) { return rotate(p, half); };
  auto line = [&](const Vec2& a, const Vec2& b) { return make_line(g(a), g(b)); };
  auto arc = [&](double r, double a0, double a1) { return make_circular_arc(r, half + a0, half + a1); };
  auto ray_pt = [&](double a, double r) { return polar(r, a); };

  const double rc0 = std::hypot(x0, w), rc1 = std::hypot(x1, w);
  const double sh = 0.5 * prm.delta2;
  std::array<std::array<NurbsCurve, 3>, 5> rows;
  rows[0] = {arc(prm.r_rt_i, -half, -prm.delta1), arc(prm.r_rt_i, -prm.delta1, prm.delta1),
             arc(prm.r_rt_i, prm.delta1, half)};
  rows[1] = {line(ray_pt(-half, rc0), Vec2(x0, -w)), line(Vec2(x0, -w), Vec2(x0, w)), line(Vec2(x0, w), ray_pt(half, rc0))};
  rows[2] = {line(ray_pt(-half, rc1), Vec2(x1, -w)), line(Vec2(x1, -w), Vec2(x1, w)), line(Vec2(x1, w), ray_pt(half, rc1))};
  rows[3] = {arc(prm.r_rt_o, -half, -sh), arc(prm.r_rt_o, -sh, sh), arc(prm.r_rt_o, sh, half)};
  rows[4] = {arc(prm.r_ag, -half, -sh), arc(prm.r_ag, -sh, sh), arc(prm.r_ag, sh, half)};
  const std::array<std::array<const char*, 3>, 4> rt_region = {{
      {"iron", "iron", "iron"},
      {"air", "magnet", "air"},
      {"air", "iron", "air"},
      {"air", "air", "air"},
  }};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int id = m.domains.rt.add_patch(detail::oriented(rows[r + 1][c], rows[r][c]));
      m.regions_rt.push_back(rt_region[r][c]);
      if (r == 1 && c == 1) m.magnet_patch = id;
    }
  }

  // ---- stator: polar tensor grid
  const double slot_pitch = tau / prm.slots_per_pole;
  std::vector<double> breaks = {0.0, tau};
  std::vector<double> centers;
  for (int k = 0; k < prm.slots_per_pole; ++k) {
    const double c = (k + 0.5) * slot_pitch;
    centers.push_back(c);
    for (double d : {prm.delta3, prm.delta4, prm.delta5}) {
      breaks.push_back(c - 0.5 * d);
      breaks.push_back(c + 0.5 * d);
    }
    breaks.push_back(c);
  }
  std::sort(breaks.begin(), breaks.end());
  const double r_l1 = prm.r_st_i + prm.l1;
  const double r_l2 = r_l1 + prm.l2;
  const double r_l3 = r_l2 + prm.l3;
  const double r_l4 = r_l3 + prm.l4;
  const std::array<double, 7> radii = {prm.r_ag, prm.r_st_i, r_l1, r_l2, r_l3, r_l4, prm.r_st_o};
  // layer 1 occupies the half slot at lower angle, layer 2 the other half
  const std::array<int, 6> layer1 = {0, 0, 2, 2, 1, 1};
  const std::array<double, 6> pol1 = {1, 1, -1, -1, 1, 1};
  const std::array<int, 6> layer2 = {1, 0, 0, 2, 2, 1};
  const std::array<double, 6> pol2 = {-1, 1, 1, -1, -1, 1};
  const double half_area = 0.25 * prm.delta3 * (r_l4 * r_l4 - r_l2 * r_l2);
  for (int k = 0; k < prm.slots_per_pole; ++k) {
    m.coils.push_back(CoilSide{{}, layer1[k], pol1[k], half_area});
    m.coils.push_back(CoilSide{{}, layer2[k], pol2[k], half_area});
  }
  for (int r = 0; r + 1 < static_cast<int>(radii.size()); ++r) {
    for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
      const int id = m.domains.st.add_patch(detail::sector(radii[r], radii[r + 1], breaks[c], breaks[c + 1]));
      const double mid = 0.5 * (breaks[c] + breaks[c + 1]);
      const int k = std::clamp(static_cast<int>(mid / slot_pitch), 0, prm.slots_per_pole - 1);
      const double d = std::abs(mid - centers[k]);
      std::string region = "iron";
      if (r == 0) {
        region = "air";
      } else if (r == 1) {
        if (d < 0.5 * prm.delta5) region = "air";
      } else if (r == 2) {
        if (d < 0.5 * prm.delta4) region = "air";
      } else if (r == 3 || r == 4) {
        if (d < 0.5 * prm.delta3) {
          region = "copper";
          m.coils[2 * k + (mid < centers[k] ? 0 : 1)].patches.push_back(id);
        }
      }
      m.regions_st.push_back(region);
    }
  }

  auto classify = [&](double r_dirichlet) {
    return [&, r_dirichlet](const NurbsCurve& c) -> std::optional<BoundaryTag> {
      if (detail::on_circle(c, r_dirichlet)) return BoundaryTag::Dirichlet;
      if (detail::on_circle(c, prm.r_ag)) return BoundaryTag::Airgap;
      if (detail::on_ray(c, 0.0)) return BoundaryTag::AntiperiodicRight;
      if (detail::on_ray(c, tau)) return BoundaryTag::AntiperiodicLeft;
      return std::nullopt;
    };
  };
  detail::classify_boundaries(m.domains.rt, classify(prm.r_rt_i));
  detail::classify_boundaries(m.domains.st, classify(prm.r_st_o));
  m.domains.rt.validate();
  m.domains.st.validate();
  m.domains.interface_radius = prm.r_ag;
  m.domains.antiperiodic_rotation = tau;

  auto material = [&](const std::string& region) {
    Material mt;
    mt.region = region;
    if (region == "iron") mt.nu = nu0 / prm.mu_r_fe;
    else if (region == "magnet") mt.nu = nu0 / prm.mu_r_pm;
    else if (region == "copper") mt.nu = nu0 / prm.mu_r_cu;
    else mt.nu = nu0;
    return mt;
  };
  for (const auto& r : m.regions_rt) m.domains.mat_rt.patch.push_back(material(r));
  for (const auto& r : m.regions_st) m.domains.mat_st.patch.push_back(material(r));
  m.domains.mat_rt.patch[m.magnet_patch].h_pm = magnet_excitation(prm);

  const double jmin = std::min(min_relative_jacobian(m.domains.rt), min_relative_jacobian(m.domains.st));
  if (!(jmin > 1e-10)) {
    std::ostringstream os;
    os << "machine geometry has a degenerate or inverted patch (relative det " << jmin << ")";
    throw ConfigError(os.str());
  }
  return m;
}

double min_relative_jacobian(const MultiPatchDomain& domain, int q) {
  const GaussRule g = gauss_legendre(q);
  double out = std::numeric_limits<double>::infinity();
  for (int p = 0; p < domain.num_patches(); ++p) {
    const NurbsPatch& np = domain.patch(p);
    const auto [lo, hi] = np.bounding_box();
    const double scale = (hi - lo).squaredNorm();
    const auto bu = np.knots_u().breakpoints();
    const auto bv = np.knots_v().breakpoints();
    for (std::size_t i = 0; i + 1 < bu.size(); ++i) {
      for (std::size_t j = 0; j + 1 < bv.size(); ++j) {
        for (int a = 0; a < q; ++a) {
          for (int b = 0; b < q; ++b) {
            const double xi = bu[i] + (bu[i + 1] - bu[i]) * g.x[a];
            const double eta = bv[j] + (bv[j + 1] - bv[j]) * g.x[b];
            out = std::min(out, np.eval(xi, eta).det / scale);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace iga
