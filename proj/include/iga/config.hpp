#pragma once

// Run configuration (YAML). Quantities may carry a unit suffix ("16 mm",
// "42 deg", "1000 rpm"); bare numbers are read as SI (m, rad, rad/s).

#include "iga/models.hpp"
#include "iga/mortar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iga {

enum class Study { Verify, InfSup, Solve, Emf };
enum class ModelKind { Verification, Machine };
enum class Coupling { Harmonic, DN, Both };

const char* study_name(Study s);
const char* model_name(ModelKind m);
const char* coupling_name(Coupling c);

enum class Unit { Length, Angle, Speed, Dimensionless };

/// "16 mm" -> 0.016. Throws ConfigError naming `field` for a malformed value
/// or a unit of the wrong kind.
double parse_quantity(const std::string& text, Unit kind, const std::string& field);

struct DNControls {
  double relax = 0.5;
  double tol = 1e-3;
  int max_iter = 100;
};

struct RunConfig {
  Study study = Study::Verify;
  ModelKind model = ModelKind::Verification;
  std::vector<int> degrees = {1, 2, 3};
  std::vector<int> levels = {4, 8, 16, 32, 64};  // elements per patch span and direction
  int max_order = 3;
  Symmetry symmetry = Symmetry::Periodic;
  std::vector<int> infsup_orders = {1, 2, 3, 4, 5};
  std::vector<double> alpha = {0.0};
  Coupling coupling = Coupling::Harmonic;
  DNControls dn;
  int quadrature = 0;                  // points per direction; 0 = degree + 1
  std::string output = "out";
  double speed = 0.0;                  // mechanical, rad/s (emf study)
  int samples = 60;                    // rotor angles per pole pitch (emf study)
  double r_split = 1.5;                // verification interface radius
  MachineParams machine;
  // slope gates of the verify study, per degree 1, 2, 3
  std::vector<double> gate_l2 = {1.7, 2.7, 3.7};
  std::vector<double> gate_jump = {1.5, 2.5, 3.5};
  std::vector<double> gate_lambda = {1.5, 3.5, 0.0};

  void validate() const;
};

/// Reads the YAML file; a relative `model_file` is resolved against the
/// config's directory.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir = ".");

/// Reads the `machine:` mapping of a YAML node text into params (defaults
/// kept for absent keys).
MachineParams parse_machine(const std::string& yaml_text, const MachineParams& base = {});

}  // namespace iga
