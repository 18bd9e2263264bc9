#ifndef SWELLFLOW_CONFIG_HPP
#define SWELLFLOW_CONFIG_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swellflow/flowlaws.hpp"
#include "swellflow/presets.hpp"

namespace swellflow {

/// Flat key-value file with [section] headers, '#' comments, strict parsing:
/// every key must be consumed by the schema or loading fails.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> section_names() const;
  std::vector<std::string> keys_in(const std::string& section) const;

  // typed consumption; defaults are returned when the key is absent
  std::string get_string(const std::string& section, const std::string& key, std::string def);
  double get_double(const std::string& section, const std::string& key, double def);
  std::uint64_t get_uint(const std::string& section, const std::string& key, std::uint64_t def);
  bool get_bool(const std::string& section, const std::string& key, bool def);
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      std::vector<double> def);
  std::vector<std::string> get_string_list(const std::string& section, const std::string& key,
                                           std::vector<std::string> def);

  /// Throws ConfigError naming every key that was never consumed.
  void require_fully_consumed() const;

 private:
  struct Entry {
    std::string value;
    bool consumed = false;
  };
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, bool> section_touched_;

  const std::string* lookup(const std::string& section, const std::string& key);
};

// ---------------------------------------------------------------------------

struct ModelConfig {
  std::string preset = "P3";
  std::vector<std::string> species_order;  // solvent last
  IncompressibleParams incompressible;
  SwellingParams swelling;
};

struct ScenarioConfig {
  std::string id = "fig5a";
  std::size_t cells = 50;
  double length = 0.1;               // [m]
  double eps_initial = 0.5;
  double eps_reference = 0.45;       // fig5b equilibrium moisture at the reservoir end
  double eps_saturation = 0.7;       // threshold sweep: achievable moisture cap
  double overburden_base = 0.0;      // [Pa]; 0 -> model reference pressure
  double overburden_gradient = 0.0;  // [Pa/m], applied vicinal-pressure slope
  double bulk_pressure_raise = 2000.0;  // [Pa], fig5c reservoir step
  std::vector<double> sweep_fractions = {0.25, 0.5, 0.75, 0.95, 1.1, 1.5};
  std::vector<double> bulk_pressure_steps = {1.0, 10.0, 100.0};
  double duration = 400.0;           // [s]
  std::size_t max_steps = 600;
  double dt_initial = 0.05;          // [s]
  double snapshot_interval = 100.0;  // [s]
  std::size_t threshold_run_steps = 25;
  double reference_velocity = 0.0;   // [m/s]; 0 -> derived from a 1 kPa bulk step
};

struct SolverConfig {
  std::string mode = "implicit";
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 25;
  int max_step_rejections = 12;
  bool electroneutrality = false;
  double velocity_tolerance_factor = 1e-11;  // equilibrium solve target, x reference velocity
};

struct OutputConfig {
  std::string directory = "out";
  std::uint64_t seed = 42;
  bool plot_data = false;
};

struct PathConfig {
  double wavelength = 1.0;
  std::size_t eval_points = 5;
  double density_amplitude = 0.02;  // relative
  double eps_amplitude = 0.05;      // absolute
  double phi_amplitude = 0.0;       // [V]
  double fd_step = 0.002;           // fraction of wavelength
};

struct RunConfig {
  std::vector<SpeciesSpec> species;  // ordered, solvent last
  ModelConfig model;
  MixtureState state;  // [state] section
  flowlaws::FlowCoefficients flow;
  ScenarioConfig scenario;
  SolverConfig solver;
  OutputConfig output;
  PathConfig path;

  std::unique_ptr<ConstitutiveModel> make_model() const;
  void validate() const;
};

/// Strict load: unknown sections or keys are errors; all quantities SI.
RunConfig load_config(const std::string& path);
RunConfig config_from_string(const std::string& text);

/// Effective configuration (defaults filled) in the same file format.
std::string print_config(const RunConfig&);

/// Built-in default configuration (single water column, preset P3).
RunConfig default_config();

}  // namespace swellflow

#endif
