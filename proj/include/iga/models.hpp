#pragma once

// Benchmark geometries: the manufactured-solution quarter ring (plus two
// auxiliary rings used as oracles) and the one-pole PMSM model.

#include "iga/assembly.hpp"
#include "iga/multipatch.hpp"

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace iga {

/// Rotor ("rt") and stator ("st") subdomains joined at a circular interface.
struct TwoDomainModel {
  MultiPatchDomain rt;
  MultiPatchDomain st;
  MaterialMap mat_rt;
  MaterialMap mat_st;
  double interface_radius = 0.0;
  /// Rotation taking AntiperiodicRight sides onto AntiperiodicLeft sides.
  std::optional<double> antiperiodic_rotation;
};

// --------------------------------------------------------------- verification

/// Quarter ring 1 <= r <= 2, 0 <= theta <= pi/2, split at r_split. The inner
/// part has 2 patches (45 degrees each), the outer part 3 (30 degrees each).
/// All outer boundaries are Dirichlet; the split circle is tagged airgap on
/// both sides.
TwoDomainModel build_quarter_ring(double r_split = 1.5);

/// Same quarter ring with one patch per side, so that equal subdivisions give
/// conforming interface traces.
TwoDomainModel build_conforming_quarter_ring(double r_split = 1.5);

/// Single-domain quarter ring (the union of the conforming pair, glued).
MultiPatchDomain build_glued_quarter_ring(double r_split = 1.5);

/// Full ring 1 <= r <= 2 with 4 patches per side and the inner part rotated
/// by `rotor_offset` radians (its patch breaks move with it).
TwoDomainModel build_full_ring(double r_split = 1.5, double rotor_offset = 0.0);

double manufactured_rhs(double x, double y);
double manufactured_solution(double x, double y);
Vec2 manufactured_gradient(double x, double y);

/// Exact multiplier data on the interface circle: -R * du*/dr (flux entering
/// the inner domain per unit angle).
double manufactured_multiplier(double theta, double radius);

// -------------------------------------------------------------------- machine

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }
constexpr double kMu0 = 4e-7 * std::numbers::pi;

/// Geometry and material data of the 6-pole PMSM. Lengths in m, angles in rad.
struct MachineParams {
  double r_rt_i = 16e-3;
  double r_rt_o = 44e-3;
  double d1 = 19e-3;        // magnet width
  double d2 = 7e-3;         // magnet height
  double d3 = 7e-3;         // magnet depth below the rotor surface
  double delta1 = deg(8.5);  // flux-barrier angle at the rotor bore
  double delta2 = deg(42);  // pole-shoe arc
  double r_st_i = 45e-3;
  double r_st_o = 67.5e-3;
  int n_turns = 12;         // per half slot
  double delta3 = deg(7);  // slot width
  double delta4 = deg(5.7);  // slot neck width
  double delta5 = deg(4);  // slot opening
  double l1 = 0.6e-3;       // tooth-tip lip
  double l2 = 5.4e-3;       // slot neck depth
  double l3 = 5e-3;         // slot body, layer next to the neck
  double l4 = 8.2e-3;       // slot body, outer layer
  double r_ag = 44.7e-3;
  double skew = 0.0;        // parsed, not modeled
  int poles = 6;
  int slots_per_pole = 6;
  double axial_length = 0.1;

  double mu_r_fe = 500.0;
  double mu_r_cu = 1.0;
  double mu_r_pm = 1.5;
  double b_r = 0.94;
  double sigma_fe = 0.0;    // inert in magnetostatics
  double sigma_cu = 5.77e7;
  double sigma_pm = 6.25e5;

  double pole_pitch() const;
  /// Throws ConfigError naming the violated relation.
  void validate() const;
};

/// One half-slot coil side.
struct CoilSide {
  std::vector<int> patches;  // stator patches forming the half slot
  int phase = 0;             // 0 = a, 1 = b, 2 = c
  double polarity = 1.0;
  double area = 0.0;         // m^2
};

struct MachineModel {
  MachineParams params;
  TwoDomainModel domains;
  std::vector<std::string> regions_rt;
  std::vector<std::string> regions_st;
  std::vector<CoilSide> coils;
  int magnet_patch = -1;
  std::vector<std::string> warnings;
};

/// |H_pm| = B_r / (mu0 mu_r,PM), directed along the pole axis.
Vec2 magnet_excitation(const MachineParams& params);

/// J_src per stator patch for phase currents (A); zero outside coil sides.
std::vector<double> winding_excitation(const MachineModel& model, const std::array<double, 3>& currents);

/// One pole (0 <= theta <= pole pitch): 12 rotor patches, 258 stator patches.
MachineModel build_pmsm_pole(const MachineParams& params);

/// Smallest det J over Gauss points relative to the patch scale squared.
double min_relative_jacobian(const MultiPatchDomain& domain, int q = 4);

}  // namespace iga
