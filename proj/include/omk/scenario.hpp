#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "omk/keldysh.hpp"
#include "omk/lindblad.hpp"
#include "omk/model.hpp"

namespace omk {

enum class ScenarioKind {
  linear_sweep,
  cooperativity_sweep,
  bath_occupancy_sweep,
  spectrum_point,
  flux_vs_G,
  instability_scan,
  two_phonon,
  classical_check,
};

enum class SolverKind { linear, leading, self_consistent, lindblad };

const char* to_string(ScenarioKind k);
const char* to_string(SolverKind s);

// The one parameter a sweep varies.
enum class SweepVariable { none, detuning, drive, bath_occupancy, single_photon_coupling };
const char* to_string(SweepVariable v);

struct Scenario {
  std::string name;
  std::string origin;  // file path or "<string>"
  ScenarioKind kind = ScenarioKind::linear_sweep;
  SolverKind solver = SolverKind::linear;
  std::vector<std::pair<std::string, std::string>> entries;  // as written, file order

  double omega_m = 50.0;
  // Values in units of kappa; detuning and G are also accepted relative to omega_M.
  ParamValues base;
  bool resonant_drive = true;
  SweepVariable sweep = SweepVariable::none;
  std::vector<double> sweep_values;  // ascending; in the unit of the config key

  WindowOptions windows;
  SolverOptions iteration;
  LindbladOptions lindblad;
  bool lindblad_auto_levels = true;
  double lindblad_step = 0.02;

  double band_half_width = 5.0;
  double spectrum_half_width = 5.0;

  std::string csv_name;
  std::string json_name;

  std::size_t points() const { return sweep_values.empty() ? 1 : sweep_values.size(); }
  // Parameters of sweep point i. Throws the model's domain errors.
  ParamValues point(std::size_t i) const;
  double sweep_value(std::size_t i) const;
};

// Flat `key = value` text with `#` comments. Throws Error(config).
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

// Regime checks that need the model, e.g. Lindblad dimension against the cap.
void validate_scenario(const Scenario& s);

struct RunOptions {
  std::string out_dir = ".";
  int workers = 1;
  bool seed_check = false;  // rerun with one worker and require identical bytes
};

struct RunResult {
  std::string csv_path;
  std::string json_path;
  std::size_t points = 0;
  std::size_t soft_failures = 0;
  bool seed_check_passed = true;
};

// Tables as strings, for tests and for the file writer.
struct RenderedRun {
  std::string csv;
  std::string json;
  std::size_t soft_failures = 0;
  std::size_t hard_failures = 0;
  std::string hard_message;  // first hard failure, empty when none
};

RenderedRun render_scenario(const Scenario& s, int workers);
RunResult run_scenario(const Scenario& s, const RunOptions& opt);

const char* version();

}  // namespace omk
