#include "swellflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swellflow/csv.hpp"
#include "swellflow/errors.hpp"

namespace swellflow {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + where + "': cannot parse '" + v + "' as a number");
  }
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file '" + path + "' not found or unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

KeyValueFile KeyValueFile::parse_string(const std::string& text, const std::string& origin) {
  KeyValueFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      }
      f.sections_[section];  // allow empty sections
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
    }
    auto& sec = f.sections_[section];
    if (sec.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + section +
                        "." + key + "'");
    }
    sec[key] = Entry{value, false};
  }
  return f;
}

bool KeyValueFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::vector<std::string> KeyValueFile::section_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) out.push_back(name);
  return out;
}

std::vector<std::string> KeyValueFile::keys_in(const std::string& section) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  for (const auto& [key, _] : it->second) out.push_back(key);
  return out;
}

const std::string* KeyValueFile::lookup(const std::string& section, const std::string& key) {
  auto it = sections_.find(section);
  if (it == sections_.end()) return nullptr;
  auto kt = it->second.find(key);
  if (kt == it->second.end()) return nullptr;
  kt->second.consumed = true;
  return &kt->second.value;
}

std::string KeyValueFile::get_string(const std::string& section, const std::string& key,
                                     std::string def) {
  const std::string* v = lookup(section, key);
  return v ? *v : def;
}

double KeyValueFile::get_double(const std::string& section, const std::string& key, double def) {
  const std::string* v = lookup(section, key);
  return v ? parse_double(*v, section + "." + key) : def;
}

std::uint64_t KeyValueFile::get_uint(const std::string& section, const std::string& key,
                                     std::uint64_t def) {
  const std::string* v = lookup(section, key);
  if (!v) return def;
  const double x = parse_double(*v, section + "." + key);
  if (x < 0.0 || x != std::floor(x)) {
    throw ConfigError("key '" + section + "." + key + "': expected a nonnegative integer");
  }
  return static_cast<std::uint64_t>(x);
}

bool KeyValueFile::get_bool(const std::string& section, const std::string& key, bool def) {
  const std::string* v = lookup(section, key);
  if (!v) return def;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("key '" + section + "." + key + "': expected true/false");
}

std::vector<double> KeyValueFile::get_double_list(const std::string& section,
                                                  const std::string& key,
                                                  std::vector<double> def) {
  const std::string* v = lookup(section, key);
  if (!v) return def;
  std::vector<double> out;
  for (const std::string& item : split_list(*v)) {
    out.push_back(parse_double(item, section + "." + key));
  }
  return out;
}

std::vector<std::string> KeyValueFile::get_string_list(const std::string& section,
                                                       const std::string& key,
                                                       std::vector<std::string> def) {
  const std::string* v = lookup(section, key);
  return v ? split_list(*v) : def;
}

void KeyValueFile::require_fully_consumed() const {
  std::vector<std::string> leftovers;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.consumed) leftovers.push_back(section + "." + key);
    }
  }
  if (!leftovers.empty()) {
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& k : leftovers) msg += " " + k;
    throw ConfigError(msg);
  }
}

// ---------------------------------------------------------------------------

namespace {

RunConfig build_config(KeyValueFile kv) {
  RunConfig cfg = default_config();

  // species come from the [model] species list; each has its own section
  cfg.model.preset = kv.get_string("model", "preset", cfg.model.preset);
  cfg.model.species_order = kv.get_string_list("model", "species", cfg.model.species_order);
  cfg.species.clear();
  for (const std::string& name : cfg.model.species_order) {
    const std::string sec = "species." + name;
    if (!kv.has_section(sec)) {
      throw ConfigError("missing section [" + sec + "] for species '" + name + "'");
    }
    SpeciesSpec sp;
    sp.name = name;
    sp.molar_mass = kv.get_double(sec, "molar_mass", 0.018);
    sp.specific_density = kv.get_double(sec, "specific_density", 997.0);
    sp.charge = kv.get_double(sec, "charge", 0.0);
    sp.validate();
    cfg.species.push_back(sp);
  }

  cfg.model.incompressible.reference_pressure =
      kv.get_double("model", "reference_pressure", cfg.model.incompressible.reference_pressure);
  cfg.model.incompressible.bulk_modulus =
      kv.get_double("model", "bulk_modulus", cfg.model.incompressible.bulk_modulus);
  cfg.model.incompressible.reference_potentials.clear();
  for (const auto& sp : cfg.species) {
    cfg.model.incompressible.reference_potentials.push_back(
        kv.get_double("model", "reference_potential." + sp.name, 0.0));
  }
  cfg.model.swelling.reference_pressure = kv.get_double(
      "model", "swelling_reference_pressure", cfg.model.swelling.reference_pressure);
  cfg.model.swelling.calibration_density =
      kv.get_double("model", "calibration_density", cfg.model.swelling.calibration_density);

  cfg.state.temperature = kv.get_double("state", "temperature", cfg.state.temperature);
  cfg.state.volume_fraction = kv.get_double("state", "volume_fraction", cfg.state.volume_fraction);
  cfg.state.electric_potential =
      kv.get_double("state", "electric_potential", cfg.state.electric_potential);
  cfg.state.partial_densities.clear();
  for (const auto& sp : cfg.species) {
    cfg.state.partial_densities.push_back(
        kv.get_double("state", "density." + sp.name, sp.specific_density));
  }

  const double r = kv.get_double("flow", "resistivity", cfg.flow.resistivity(0, 0));
  cfg.flow.resistivity = flowlaws::Mat3::Identity() * r;
  cfg.flow.fick_mobility.clear();
  cfg.flow.hydration_coeff.clear();
  for (const auto& sp : cfg.species) {
    cfg.flow.fick_mobility.push_back(flowlaws::Mat3::Identity() *
                                     kv.get_double("flow", "fick_mobility." + sp.name, 0.0));
    cfg.flow.hydration_coeff.push_back(kv.get_double("flow", "hydration." + sp.name, 0.0));
  }

  ScenarioConfig& sc = cfg.scenario;
  sc.id = kv.get_string("scenario", "id", sc.id);
  sc.cells = kv.get_uint("scenario", "cells", sc.cells);
  sc.length = kv.get_double("scenario", "length", sc.length);
  sc.eps_initial = kv.get_double("scenario", "eps_initial", sc.eps_initial);
  sc.eps_reference = kv.get_double("scenario", "eps_reference", sc.eps_reference);
  sc.eps_saturation = kv.get_double("scenario", "eps_saturation", sc.eps_saturation);
  sc.overburden_base = kv.get_double("scenario", "overburden_base", sc.overburden_base);
  sc.overburden_gradient =
      kv.get_double("scenario", "overburden_gradient", sc.overburden_gradient);
  sc.bulk_pressure_raise =
      kv.get_double("scenario", "bulk_pressure_raise", sc.bulk_pressure_raise);
  sc.sweep_fractions = kv.get_double_list("scenario", "sweep_fractions", sc.sweep_fractions);
  sc.bulk_pressure_steps =
      kv.get_double_list("scenario", "bulk_pressure_steps", sc.bulk_pressure_steps);
  sc.duration = kv.get_double("scenario", "duration", sc.duration);
  sc.max_steps = kv.get_uint("scenario", "max_steps", sc.max_steps);
  sc.dt_initial = kv.get_double("scenario", "dt_initial", sc.dt_initial);
  sc.snapshot_interval = kv.get_double("scenario", "snapshot_interval", sc.snapshot_interval);
  sc.threshold_run_steps = kv.get_uint("scenario", "threshold_run_steps", sc.threshold_run_steps);
  sc.reference_velocity = kv.get_double("scenario", "reference_velocity", sc.reference_velocity);

  SolverConfig& sol = cfg.solver;
  sol.mode = kv.get_string("solver", "mode", sol.mode);
  sol.newton_tolerance = kv.get_double("solver", "newton_tolerance", sol.newton_tolerance);
  sol.newton_max_iterations = static_cast<int>(
      kv.get_uint("solver", "newton_max_iterations", sol.newton_max_iterations));
  sol.max_step_rejections =
      static_cast<int>(kv.get_uint("solver", "max_step_rejections", sol.max_step_rejections));
  sol.electroneutrality = kv.get_bool("solver", "electroneutrality", sol.electroneutrality);
  sol.velocity_tolerance_factor =
      kv.get_double("solver", "velocity_tolerance_factor", sol.velocity_tolerance_factor);

  cfg.output.directory = kv.get_string("output", "directory", cfg.output.directory);
  cfg.output.seed = kv.get_uint("output", "seed", cfg.output.seed);
  cfg.output.plot_data = kv.get_bool("output", "plot_data", cfg.output.plot_data);

  PathConfig& pc = cfg.path;
  pc.wavelength = kv.get_double("flowcompare", "wavelength", pc.wavelength);
  pc.eval_points = kv.get_uint("flowcompare", "eval_points", pc.eval_points);
  pc.density_amplitude = kv.get_double("flowcompare", "density_amplitude", pc.density_amplitude);
  pc.eps_amplitude = kv.get_double("flowcompare", "eps_amplitude", pc.eps_amplitude);
  pc.phi_amplitude = kv.get_double("flowcompare", "phi_amplitude", pc.phi_amplitude);
  pc.fd_step = kv.get_double("flowcompare", "fd_step", pc.fd_step);

  kv.require_fully_consumed();
  cfg.validate();
  return cfg;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  return build_config(KeyValueFile::parse_file(path));
}

RunConfig config_from_string(const std::string& text) {
  return build_config(KeyValueFile::parse_string(text));
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.model.preset = "P3";
  cfg.model.species_order = {"water"};
  SpeciesSpec water;
  water.name = "water";
  water.molar_mass = 0.018;
  water.specific_density = 997.0;
  water.charge = 0.0;
  cfg.species = {water};
  cfg.model.incompressible.reference_pressure = kStandardPressure;
  cfg.model.incompressible.bulk_modulus = 1e6;  // scenario-scale stiffness
  cfg.model.incompressible.reference_potentials = {0.0};
  cfg.model.swelling.reference_pressure = kStandardPressure;
  cfg.model.swelling.calibration_density = 0.0;

  cfg.state.temperature = 298.15;
  cfg.state.volume_fraction = 0.5;
  cfg.state.partial_densities = {997.0};
  cfg.state.electric_potential = 0.0;

  cfg.flow.resistivity = flowlaws::Mat3::Identity() * 1e9;
  cfg.flow.fick_mobility = {flowlaws::Mat3::Zero()};
  cfg.flow.hydration_coeff = {0.0};
  return cfg;
}

std::unique_ptr<ConstitutiveModel> RunConfig::make_model() const {
  return make_preset(model.preset, species, model.incompressible, model.swelling);
}

void RunConfig::validate() const {
  if (species.empty()) throw ConfigError("no species configured");
  if (state.partial_densities.size() != species.size()) {
    throw ConfigError("state densities do not match the species list");
  }
  if (!(solver.newton_tolerance > 0.0)) {
    throw ConfigError("solver.newton_tolerance must be > 0");
  }
  if (!(solver.velocity_tolerance_factor > 0.0)) {
    throw ConfigError("solver.velocity_tolerance_factor must be > 0");
  }
  if (solver.mode != "implicit" && solver.mode != "explicit") {
    throw ConfigError("solver.mode must be implicit or explicit");
  }
  if (scenario.cells < 2) throw ConfigError("scenario.cells must be >= 2");
  if (!(scenario.length > 0.0)) throw ConfigError("scenario.length must be > 0");
  if (!(scenario.dt_initial > 0.0)) throw ConfigError("scenario.dt_initial must be > 0");
  if (!(scenario.eps_initial > 0.0) || scenario.eps_initial > 1.0) {
    throw ConfigError("scenario.eps_initial must be in (0, 1]");
  }
  if (!(scenario.snapshot_interval > 0.0)) {
    throw ConfigError("scenario.snapshot_interval must be > 0");
  }
  state.validate();
}

std::string print_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto d = [](double v) { return format_double(v); };
  for (const auto& sp : cfg.species) {
    out << "[species." << sp.name << "]\n";
    out << "molar_mass = " << d(sp.molar_mass) << "\n";
    out << "specific_density = " << d(sp.specific_density) << "\n";
    out << "charge = " << d(sp.charge) << "\n\n";
  }
  out << "[model]\n";
  out << "preset = " << cfg.model.preset << "\n";
  out << "species = ";
  for (std::size_t i = 0; i < cfg.model.species_order.size(); ++i) {
    out << (i ? "," : "") << cfg.model.species_order[i];
  }
  out << "\n";
  out << "reference_pressure = " << d(cfg.model.incompressible.reference_pressure) << "\n";
  out << "bulk_modulus = " << d(cfg.model.incompressible.bulk_modulus) << "\n";
  for (std::size_t i = 0; i < cfg.species.size(); ++i) {
    out << "reference_potential." << cfg.species[i].name << " = "
        << d(cfg.model.incompressible.reference_potentials[i]) << "\n";
  }
  out << "swelling_reference_pressure = " << d(cfg.model.swelling.reference_pressure) << "\n";
  out << "calibration_density = " << d(cfg.model.swelling.calibration_density) << "\n\n";
  out << "[state]\n";
  out << "temperature = " << d(cfg.state.temperature) << "\n";
  out << "volume_fraction = " << d(cfg.state.volume_fraction) << "\n";
  out << "electric_potential = " << d(cfg.state.electric_potential) << "\n";
  for (std::size_t i = 0; i < cfg.species.size(); ++i) {
    out << "density." << cfg.species[i].name << " = " << d(cfg.state.partial_densities[i])
        << "\n";
  }
  out << "\n[flow]\n";
  out << "resistivity = " << d(cfg.flow.resistivity(0, 0)) << "\n";
  for (std::size_t i = 0; i < cfg.species.size(); ++i) {
    out << "fick_mobility." << cfg.species[i].name << " = " << d(cfg.flow.mobility(i)(0, 0))
        << "\n";
    out << "hydration." << cfg.species[i].name << " = " << d(cfg.flow.hydration(i)) << "\n";
  }
  const ScenarioConfig& sc = cfg.scenario;
  out << "\n[scenario]\n";
  out << "id = " << sc.id << "\n";
  out << "cells = " << sc.cells << "\n";
  out << "length = " << d(sc.length) << "\n";
  out << "eps_initial = " << d(sc.eps_initial) << "\n";
  out << "eps_reference = " << d(sc.eps_reference) << "\n";
  out << "eps_saturation = " << d(sc.eps_saturation) << "\n";
  out << "overburden_base = " << d(sc.overburden_base) << "\n";
  out << "overburden_gradient = " << d(sc.overburden_gradient) << "\n";
  out << "bulk_pressure_raise = " << d(sc.bulk_pressure_raise) << "\n";
  out << "sweep_fractions = ";
  for (std::size_t i = 0; i < sc.sweep_fractions.size(); ++i) {
    out << (i ? "," : "") << d(sc.sweep_fractions[i]);
  }
  out << "\nbulk_pressure_steps = ";
  for (std::size_t i = 0; i < sc.bulk_pressure_steps.size(); ++i) {
    out << (i ? "," : "") << d(sc.bulk_pressure_steps[i]);
  }
  out << "\nduration = " << d(sc.duration) << "\n";
  out << "max_steps = " << sc.max_steps << "\n";
  out << "dt_initial = " << d(sc.dt_initial) << "\n";
  out << "snapshot_interval = " << d(sc.snapshot_interval) << "\n";
  out << "threshold_run_steps = " << sc.threshold_run_steps << "\n";
  out << "reference_velocity = " << d(sc.reference_velocity) << "\n";
  out << "\n[solver]\n";
  out << "mode = " << cfg.solver.mode << "\n";
  out << "newton_tolerance = " << d(cfg.solver.newton_tolerance) << "\n";
  out << "newton_max_iterations = " << cfg.solver.newton_max_iterations << "\n";
  out << "max_step_rejections = " << cfg.solver.max_step_rejections << "\n";
  out << "electroneutrality = " << (cfg.solver.electroneutrality ? "true" : "false") << "\n";
  out << "velocity_tolerance_factor = " << d(cfg.solver.velocity_tolerance_factor) << "\n";
  out << "\n[output]\n";
  out << "directory = " << cfg.output.directory << "\n";
  out << "seed = " << cfg.output.seed << "\n";
  out << "plot_data = " << (cfg.output.plot_data ? "true" : "false") << "\n";
  out << "\n[flowcompare]\n";
  out << "wavelength = " << d(cfg.path.wavelength) << "\n";
  out << "eval_points = " << cfg.path.eval_points << "\n";
  out << "density_amplitude = " << d(cfg.path.density_amplitude) << "\n";
  out << "eps_amplitude = " << d(cfg.path.eps_amplitude) << "\n";
  out << "phi_amplitude = " << d(cfg.path.phi_amplitude) << "\n";
  out << "fd_step = " << d(cfg.path.fd_step) << "\n";
  return out.str();
}

}  // namespace swellflow
