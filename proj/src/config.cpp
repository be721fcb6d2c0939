#include "iga/config.hpp"

#include "iga/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace iga {

namespace {

struct UnitDef {
  Unit kind;
  double factor;
};

const std::map<std::string, UnitDef>& unit_table() {
  static const std::map<std::string, UnitDef> t = {
      {"m", {Unit::Length, 1.0}},
      {"cm", {Unit::Length, 1e-2}},
      {"mm", {Unit::Length, 1e-3}},
      {"um", {Unit::Length, 1e-6}},
      {"rad", {Unit::Angle, 1.0}},
      {"deg", {Unit::Angle, std::numbers::pi / 180.0}},
      {"rad/s", {Unit::Speed, 1.0}},
      {"rpm", {Unit::Speed, 2.0 * std::numbers::pi / 60.0}},
      {"T", {Unit::Dimensionless, 1.0}},
  };
  return t;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::string scalar_text(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(field, "expected a scalar");
  return n.Scalar();
}

double quantity(const YAML::Node& n, Unit kind, const std::string& field) {
  return parse_quantity(scalar_text(n, field), kind, field);
}

int integer(const YAML::Node& n, const std::string& field) {
  const std::string s = scalar_text(n, field);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    fail(field, "expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) fail(field, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::vector<int> int_list(const YAML::Node& n, const std::string& field) {
  std::vector<int> out;
  if (n.IsScalar()) {
    out.push_back(integer(n, field));
    return out;
  }
  if (!n.IsSequence()) fail(field, "expected an integer or a list of integers");
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(integer(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> quantity_list(const YAML::Node& n, Unit kind, const std::string& field) {
  std::vector<double> out;
  if (n.IsScalar()) {
    out.push_back(quantity(n, kind, field));
    return out;
  }
  if (!n.IsSequence()) fail(field, "expected a value or a list");
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(quantity(n[i], kind, field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& known, const std::string& where) {
  if (!map.IsMap()) fail(where.empty() ? "<root>" : where, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!known.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <class E>
E enum_value(const YAML::Node& n, const std::string& field, const std::map<std::string, E>& names) {
  const std::string s = scalar_text(n, field);
  const auto it = names.find(s);
  if (it == names.end()) {
    std::string opts;
    for (const auto& [k, v] : names) opts += (opts.empty() ? "" : ", ") + k;
    fail(field, "'" + s + "' is not one of {" + opts + "}");
  }
  return it->second;
}

struct MachineField {
  const char* name;
  Unit unit;
  double MachineParams::*value;
};

const std::vector<MachineField>& machine_fields() {
  static const std::vector<MachineField> f = {
      {"r_rt_i", Unit::Length, &MachineParams::r_rt_i},
      {"r_rt_o", Unit::Length, &MachineParams::r_rt_o},
      {"d1", Unit::Length, &MachineParams::d1},
      {"d2", Unit::Length, &MachineParams::d2},
      {"d3", Unit::Length, &MachineParams::d3},
      {"delta1", Unit::Angle, &MachineParams::delta1},
      {"delta2", Unit::Angle, &MachineParams::delta2},
      {"r_st_i", Unit::Length, &MachineParams::r_st_i},
      {"r_st_o", Unit::Length, &MachineParams::r_st_o},
      {"delta3", Unit::Angle, &MachineParams::delta3},
      {"delta4", Unit::Angle, &MachineParams::delta4},
      {"delta5", Unit::Angle, &MachineParams::delta5},
      {"l1", Unit::Length, &MachineParams::l1},
      {"l2", Unit::Length, &MachineParams::l2},
      {"l3", Unit::Length, &MachineParams::l3},
      {"l4", Unit::Length, &MachineParams::l4},
      {"r_ag", Unit::Length, &MachineParams::r_ag},
      {"skew", Unit::Angle, &MachineParams::skew},
      {"axial_length", Unit::Length, &MachineParams::axial_length},
      {"mu_r_fe", Unit::Dimensionless, &MachineParams::mu_r_fe},
      {"mu_r_cu", Unit::Dimensionless, &MachineParams::mu_r_cu},
      {"mu_r_pm", Unit::Dimensionless, &MachineParams::mu_r_pm},
      {"b_r", Unit::Dimensionless, &MachineParams::b_r},
      {"sigma_fe", Unit::Dimensionless, &MachineParams::sigma_fe},
      {"sigma_cu", Unit::Dimensionless, &MachineParams::sigma_cu},
      {"sigma_pm", Unit::Dimensionless, &MachineParams::sigma_pm},
  };
  return f;
}

MachineParams machine_from_node(const YAML::Node& n, MachineParams p, const std::string& where) {
  std::set<std::string> known = {"n_turns", "poles", "slots_per_pole"};
  for (const auto& f : machine_fields()) known.insert(f.name);
  reject_unknown(n, known, where);
  for (const auto& f : machine_fields()) {
    if (n[f.name]) p.*(f.value) = quantity(n[f.name], f.unit, where + "." + f.name);
  }
  if (n["n_turns"]) p.n_turns = integer(n["n_turns"], where + ".n_turns");
  if (n["poles"]) p.poles = integer(n["poles"], where + ".poles");
  if (n["slots_per_pole"]) p.slots_per_pole = integer(n["slots_per_pole"], where + ".slots_per_pole");
  try {
    p.validate();
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return p;
}

YAML::Node load_yaml(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(what + ": YAML syntax error: " + e.what());
  }
}

std::string read_file(const std::string& path, const std::string& field) {
  std::ifstream f(path);
  if (!f) fail(field, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

const char* study_name(Study s) {
  switch (s) {
    case Study::Verify: return "verify";
    case Study::InfSup: return "infsup";
    case Study::Solve: return "solve";
    case Study::Emf: return "emf";
  }
  return "?";
}

const char* model_name(ModelKind m) { return m == ModelKind::Machine ? "machine" : "verification"; }

const char* coupling_name(Coupling c) {
  switch (c) {
    case Coupling::Harmonic: return "harmonic";
    case Coupling::DN: return "dn";
    case Coupling::Both: return "both";
  }
  return "?";
}

double parse_quantity(const std::string& text, Unit kind, const std::string& field) {
  std::istringstream is(text);
  double v = 0.0;
  if (!(is >> v)) fail(field, "expected a number, got '" + text + "'");
  std::string unit, extra;
  is >> unit;
  if (is >> extra) fail(field, "trailing text in '" + text + "'");
  if (!std::isfinite(v)) fail(field, "value must be finite");
  if (unit.empty()) return v;
  const auto it = unit_table().find(unit);
  if (it == unit_table().end()) fail(field, "unknown unit '" + unit + "'");
  if (it->second.kind != kind) fail(field, "unit '" + unit + "' does not fit this quantity");
  return v * it->second.factor;
}

void RunConfig::validate() const {
  if (degrees.empty()) fail("degrees", "at least one degree is required");
  for (int p : degrees) {
    if (p < 1 || p > 6) fail("degrees", "degree must lie in 1..6");
  }
  if (levels.empty()) fail("levels", "at least one refinement level is required");
  for (int l : levels) {
    if (l < 1) fail("levels", "levels are element counts and must be >= 1");
  }
  if (max_order < 0) fail("harmonics.max_order", "must be >= 0");
  if (study == Study::InfSup) {
    if (infsup_orders.empty()) fail("infsup_orders", "the harmonic sweep is empty");
    for (int m : infsup_orders) {
      if (m < 0) fail("infsup_orders", "orders must be >= 0");
    }
  }
  if (!(dn.relax > 0.0 && dn.relax <= 1.0)) fail("dn.relax", "must lie in (0, 1]");
  if (!(dn.tol > 0.0)) fail("dn.tol", "must be positive");
  if (dn.max_iter < 1) fail("dn.max_iter", "must be >= 1");
  if (quadrature < 0) fail("quadrature", "must be >= 0");
  if (output.empty()) fail("output", "must not be empty");
  if (alpha.empty()) fail("alpha", "at least one rotor angle is required");
  if (!(r_split > 1.0 && r_split < 2.0)) fail("r_split", "must lie strictly between 1 and 2");
  if (study == Study::Verify || study == Study::InfSup) {
    if (model != ModelKind::Verification) fail("model", "the verify and infsup studies run on the verification model");
  }
  if (study == Study::Emf) {
    if (model != ModelKind::Machine) fail("model", "the emf study needs the machine model");
    if (!(speed > 0.0)) fail("speed", "the emf study needs a positive nominal speed");
    if (samples < 4 || samples % 2) fail("samples", "must be an even number >= 4");
    if (coupling == Coupling::Both) fail("coupling", "the emf study runs one coupling method");
  }
  if (model == ModelKind::Machine && symmetry != Symmetry::Antiperiodic) {
    fail("harmonics.symmetry", "the machine pole needs antiperiodic harmonics");
  }
  if (model == ModelKind::Verification && coupling != Coupling::Harmonic) {
    for (double a : alpha) {
      if (a != 0.0) fail("alpha", "DN coupling on the verification model is defined for alpha = 0 only");
    }
  }
  if (model == ModelKind::Verification) {
    for (double a : alpha) {
      if (a != 0.0) fail("alpha", "the quarter-ring interface cannot rotate; use alpha = 0");
    }
  }
  machine.validate();
}

MachineParams parse_machine(const std::string& yaml_text, const MachineParams& base) {
  const YAML::Node root = load_yaml(yaml_text, "machine file");
  const YAML::Node n = root["machine"] ? root["machine"] : root;
  return machine_from_node(n, base, "machine");
}

RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir) {
  const YAML::Node root = load_yaml(yaml_text, "config");
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  reject_unknown(root,
                 {"study", "model", "degrees", "levels", "harmonics", "infsup_orders", "alpha", "coupling", "dn",
                  "quadrature", "output", "speed", "samples", "r_split", "model_file", "machine", "gates"},
                 "");
  RunConfig c;
  if (!root["study"]) fail("study", "missing");
  c.study = enum_value<Study>(root["study"], "study",
                              {{"verify", Study::Verify}, {"infsup", Study::InfSup}, {"solve", Study::Solve},
                               {"emf", Study::Emf}});
  if (root["model"]) {
    c.model = enum_value<ModelKind>(root["model"], "model",
                                    {{"verification", ModelKind::Verification}, {"machine", ModelKind::Machine}});
  } else if (c.study == Study::Emf) {
    c.model = ModelKind::Machine;
  }
  if (c.model == ModelKind::Machine) {
    c.symmetry = Symmetry::Antiperiodic;
    c.max_order = 15;
    c.levels = {2};
    c.degrees = {2};
  }
  if (c.study == Study::InfSup) {
    c.degrees = {2};
    c.levels = {4, 8, 16, 32};
  }
  if (root["degrees"]) c.degrees = int_list(root["degrees"], "degrees");
  if (root["levels"]) c.levels = int_list(root["levels"], "levels");
  if (const YAML::Node h = root["harmonics"]) {
    reject_unknown(h, {"max_order", "symmetry"}, "harmonics");
    if (h["max_order"]) c.max_order = integer(h["max_order"], "harmonics.max_order");
    if (h["symmetry"]) {
      c.symmetry = enum_value<Symmetry>(h["symmetry"], "harmonics.symmetry",
                                        {{"periodic", Symmetry::Periodic}, {"antiperiodic", Symmetry::Antiperiodic}});
    }
  }
  if (root["infsup_orders"]) c.infsup_orders = int_list(root["infsup_orders"], "infsup_orders");
  if (root["alpha"]) c.alpha = quantity_list(root["alpha"], Unit::Angle, "alpha");
  if (root["coupling"]) {
    c.coupling = enum_value<Coupling>(root["coupling"], "coupling",
                                      {{"harmonic", Coupling::Harmonic}, {"dn", Coupling::DN}, {"both", Coupling::Both}});
  }
  if (const YAML::Node d = root["dn"]) {
    reject_unknown(d, {"relax", "tol", "max_iter"}, "dn");
    if (d["relax"]) c.dn.relax = quantity(d["relax"], Unit::Dimensionless, "dn.relax");
    if (d["tol"]) c.dn.tol = quantity(d["tol"], Unit::Dimensionless, "dn.tol");
    if (d["max_iter"]) c.dn.max_iter = integer(d["max_iter"], "dn.max_iter");
  }
  if (root["quadrature"]) c.quadrature = integer(root["quadrature"], "quadrature");
  if (root["output"]) c.output = scalar_text(root["output"], "output");
  if (root["speed"]) c.speed = quantity(root["speed"], Unit::Speed, "speed");
  if (root["samples"]) c.samples = integer(root["samples"], "samples");
  if (root["r_split"]) c.r_split = quantity(root["r_split"], Unit::Dimensionless, "r_split");
  if (root["model_file"]) {
    std::filesystem::path p = scalar_text(root["model_file"], "model_file");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    const YAML::Node m = load_yaml(read_file(p.string(), "model_file"), "model_file");
    c.machine = machine_from_node(m["machine"] ? m["machine"] : m, c.machine, "model_file:machine");
  }
  if (root["machine"]) c.machine = machine_from_node(root["machine"], c.machine, "machine");
  if (const YAML::Node g = root["gates"]) {
    reject_unknown(g, {"l2", "jump", "lambda"}, "gates");
    auto gate = [&](const char* key, std::vector<double>& dst) {
      if (!g[key]) return;
      dst = quantity_list(g[key], Unit::Dimensionless, std::string("gates.") + key);
      if (dst.size() != 3) fail(std::string("gates.") + key, "expected three values (degrees 1, 2, 3)");
    };
    gate("l2", c.gate_l2);
    gate("jump", c.gate_jump);
    gate("lambda", c.gate_lambda);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_file(path, "--config");
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(text, dir.empty() ? "." : dir);
}

}  // namespace iga
