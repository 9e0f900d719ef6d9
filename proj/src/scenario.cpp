#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "omk/error.hpp"
#include "omk/scenario.hpp"

namespace omk {

const char* version() { return OMK_VERSION_STRING; }

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::linear_sweep: return "linear_sweep";
    case ScenarioKind::cooperativity_sweep: return "cooperativity_sweep";
    case ScenarioKind::bath_occupancy_sweep: return "bath_occupancy_sweep";
    case ScenarioKind::spectrum_point: return "spectrum_point";
    case ScenarioKind::flux_vs_G: return "flux_vs_G";
    case ScenarioKind::instability_scan: return "instability_scan";
    case ScenarioKind::two_phonon: return "two_phonon";
    case ScenarioKind::classical_check: return "classical_check";
  }
  return "?";
}

const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::linear: return "linear";
    case SolverKind::leading: return "leading";
    case SolverKind::self_consistent: return "self_consistent";
    case SolverKind::lindblad: return "lindblad";
  }
  return "?";
}

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::none: return "none";
    case SweepVariable::detuning: return "delta_over_omega_m";
    case SweepVariable::drive: return "G_over_omega_m";
    case SweepVariable::bath_occupancy: return "n_th";
    case SweepVariable::single_photon_coupling: return "g";
  }
  return "?";
}

namespace {

[[noreturn]] void config_error(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  fail(ErrorCode::config, os.str());
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = b + t.size();
  if (*b == '+') ++b;
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

template <class Map, class Enum>
bool lookup(const Map& m, const std::string& key, Enum& out) {
  auto it = m.find(key);
  if (it == m.end()) return false;
  out = it->second;
  return true;
}

struct Parser {
  std::string origin;
  int line = 0;

  double number(const std::string& key, const std::string& v) const {
    double x;
    if (!parse_double(v, x)) config_error(origin, line, "`" + key + "` expects a number, got `" + v + "`");
    return x;
  }

  std::size_t count(const std::string& key, const std::string& v) const {
    const double x = number(key, v);
    if (x < 0 || x != std::floor(x) || x > 1e12)
      config_error(origin, line, "`" + key + "` expects a nonnegative integer, got `" + v + "`");
    return static_cast<std::size_t>(x);
  }

  bool flag(const std::string& key, const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    config_error(origin, line, "`" + key + "` expects true or false, got `" + v + "`");
  }

  // Scalar, `start:stop:count`, or comma-separated list. Sorted ascending.
  std::vector<double> values(const std::string& key, const std::string& v) const {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::stringstream ss(v);
      std::string p;
      while (std::getline(ss, p, ':')) parts.push_back(p);
      if (parts.size() != 3) config_error(origin, line, "`" + key + "` range must be start:stop:count");
      const double a = number(key, parts[0]), b = number(key, parts[1]);
      const std::size_t n = count(key, parts[2]);
      if (n == 0) config_error(origin, line, "`" + key + "` range is empty");
      if (n == 1 && a != b) config_error(origin, line, "`" + key + "` range with one point needs start == stop");
      for (std::size_t i = 0; i < n; ++i)
        out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    } else {
      std::stringstream ss(v);
      std::string p;
      while (std::getline(ss, p, ',')) {
        if (trim(p).empty()) config_error(origin, line, "`" + key + "` has an empty list entry");
        out.push_back(number(key, p));
      }
      if (out.empty()) config_error(origin, line, "`" + key + "` is empty");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

}  // namespace

double Scenario::sweep_value(std::size_t i) const { return sweep_values.empty() ? 0.0 : sweep_values.at(i); }

ParamValues Scenario::point(std::size_t i) const {
  ParamValues v = base;
  v.mech_freq = omega_m;
  double delta_rel = base.detuning / omega_m;
  double g_rel = base.drive_coupling / omega_m;
  switch (sweep) {
    case SweepVariable::detuning: delta_rel = sweep_value(i); break;
    case SweepVariable::drive: g_rel = sweep_value(i); break;
    case SweepVariable::bath_occupancy: v.mech_bath_occupancy = sweep_value(i); break;
    case SweepVariable::single_photon_coupling: v.single_photon_coupling = sweep_value(i); break;
    case SweepVariable::none: break;
  }
  v.detuning = delta_rel * omega_m;
  v.drive_coupling = resonant_drive ? resonant_coupling(v.detuning, omega_m) : g_rel * omega_m;
  return v;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  static const std::map<std::string, ScenarioKind> kinds{
      {"linear_sweep", ScenarioKind::linear_sweep},
      {"cooperativity_sweep", ScenarioKind::cooperativity_sweep},
      {"bath_occupancy_sweep", ScenarioKind::bath_occupancy_sweep},
      {"spectrum_point", ScenarioKind::spectrum_point},
      {"flux_vs_G", ScenarioKind::flux_vs_G},
      {"instability_scan", ScenarioKind::instability_scan},
      {"two_phonon", ScenarioKind::two_phonon},
      {"classical_check", ScenarioKind::classical_check}};
  static const std::map<std::string, SolverKind> solvers{{"linear", SolverKind::linear},
                                                          {"leading", SolverKind::leading},
                                                          {"self_consistent", SolverKind::self_consistent},
                                                          {"lindblad", SolverKind::lindblad}};

  Scenario s;
  s.origin = origin;
  Parser P{origin, 0};
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  bool have_kind = false, have_solver = false;
  double delta_rel = -1.0, g_rel = 0.0;
  std::vector<std::pair<SweepVariable, std::vector<double>>> ranges;

  auto maybe_range = [&](SweepVariable var, const std::string& key, const std::string& v, double& scalar) {
    std::vector<double> vals = P.values(key, v);
    if (vals.size() == 1 && v.find(':') == std::string::npos && v.find(',') == std::string::npos)
      scalar = vals[0];
    else
      ranges.emplace_back(var, std::move(vals));
  };

  while (std::getline(in, raw)) {
    ++P.line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) config_error(origin, P.line, "expected `key = value`");
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (key.empty()) config_error(origin, P.line, "missing key");
    if (val.empty()) config_error(origin, P.line, "`" + key + "` has no value");
    if (seen.count(key)) config_error(origin, P.line, "duplicate key `" + key + "`");
    seen[key] = P.line;
    s.entries.emplace_back(key, val);

    if (key == "name") {
      s.name = val;
    } else if (key == "kind") {
      if (!lookup(kinds, val, s.kind)) config_error(origin, P.line, "unknown scenario kind `" + val + "`");
      have_kind = true;
    } else if (key == "solver") {
      if (!lookup(solvers, val, s.solver)) config_error(origin, P.line, "unknown solver `" + val + "`");
      have_solver = true;
    } else if (key == "omega_m_over_kappa") {
      s.omega_m = P.number(key, val);
      if (!(s.omega_m > 0.0)) config_error(origin, P.line, "omega_m_over_kappa must be positive");
    } else if (key == "kappa") {
      if (P.number(key, val) != 1.0) config_error(origin, P.line, "kappa is the unit and must be 1");
    } else if (key == "delta_over_omega_m") {
      maybe_range(SweepVariable::detuning, key, val, delta_rel);
    } else if (key == "G_over_omega_m") {
      if (val == "resonant") {
        s.resonant_drive = true;
      } else {
        s.resonant_drive = false;
        maybe_range(SweepVariable::drive, key, val, g_rel);
      }
    } else if (key == "g") {
      maybe_range(SweepVariable::single_photon_coupling, key, val, s.base.single_photon_coupling);
    } else if (key == "n_th") {
      maybe_range(SweepVariable::bath_occupancy, key, val, s.base.mech_bath_occupancy);
    } else if (key == "gamma") {
      s.base.mech_damping = P.number(key, val);
    } else if (key == "bath_model") {
      if (val == "flat")
        s.base.bath = MechanicalBath::flat;
      else if (val == "bose")
        s.base.bath = MechanicalBath::bose;
      else
        config_error(origin, P.line, "bath_model must be flat or bose");
    } else if (key == "window_half_width_factor") {
      s.windows.half_width_factor = P.number(key, val);
    } else if (key == "window_resolution") {
      s.windows.resolution = P.number(key, val);
    } else if (key == "window_min_points") {
      s.windows.min_points = P.count(key, val);
    } else if (key == "window_max_points") {
      s.windows.max_points = P.count(key, val);
    } else if (key == "iterations") {
      s.iteration.max_iterations = static_cast<int>(P.count(key, val));
    } else if (key == "mixing") {
      s.iteration.mixing = P.number(key, val);
    } else if (key == "tolerance") {
      s.iteration.tolerance = P.number(key, val);
    } else if (key == "lindblad_levels") {
      if (val == "auto") {
        s.lindblad_auto_levels = true;
      } else {
        s.lindblad_auto_levels = false;
        const auto comma = val.find(',');
        const std::string a = comma == std::string::npos ? val : val.substr(0, comma);
        const std::string b = comma == std::string::npos ? val : val.substr(comma + 1);
        s.lindblad.levels_minus = static_cast<int>(P.count(key, a));
        s.lindblad.levels_plus = static_cast<int>(P.count(key, b));
      }
    } else if (key == "lindblad_hamiltonian") {
      if (val == "resonant")
        s.lindblad.hamiltonian = HamiltonianKind::resonant;
      else if (val == "full")
        s.lindblad.hamiltonian = HamiltonianKind::full;
      else
        config_error(origin, P.line, "lindblad_hamiltonian must be resonant or full");
    } else if (key == "lindblad_linear_terms") {
      s.lindblad.include_linear_terms = P.flag(key, val);
    } else if (key == "lindblad_max_dimension") {
      s.lindblad.max_hilbert_dimension = P.count(key, val);
    } else if (key == "lindblad_frequency_step") {
      s.lindblad_step = P.number(key, val);
      if (!(s.lindblad_step > 0.0)) config_error(origin, P.line, "lindblad_frequency_step must be positive");
    } else if (key == "band_half_width") {
      s.band_half_width = P.number(key, val);
      if (!(s.band_half_width > 0.0)) config_error(origin, P.line, "band_half_width must be positive");
    } else if (key == "spectrum_half_width") {
      s.spectrum_half_width = P.number(key, val);
      if (!(s.spectrum_half_width > 0.0)) config_error(origin, P.line, "spectrum_half_width must be positive");
    } else if (key == "output") {
      s.csv_name = val;
    } else if (key == "summary") {
      s.json_name = val;
    } else {
      config_error(origin, P.line, "unknown key `" + key + "`");
    }
  }
  P.line = 0;
  if (!have_kind) config_error(origin, 0, "missing `kind`");
  if (ranges.size() > 1) config_error(origin, 0, "only one key may be swept per scenario");
  if (!ranges.empty()) {
    s.sweep = ranges[0].first;
    s.sweep_values = ranges[0].second;
  }
  s.base.mech_freq = s.omega_m;
  s.base.detuning = delta_rel * s.omega_m;
  s.base.drive_coupling = g_rel * s.omega_m;

  const bool single = s.kind == ScenarioKind::spectrum_point || s.kind == ScenarioKind::two_phonon;
  if (single && s.sweep != SweepVariable::none)
    config_error(origin, 0, std::string(to_string(s.kind)) + " evaluates a single parameter point; remove the range");
  if (!single && s.sweep == SweepVariable::none)
    config_error(origin, 0, std::string(to_string(s.kind)) + " needs one swept key (start:stop:count or a list)");
  if (s.kind == ScenarioKind::flux_vs_G && s.sweep != SweepVariable::drive)
    config_error(origin, 0, "flux_vs_G sweeps G_over_omega_m");
  if (s.sweep == SweepVariable::drive && s.resonant_drive)
    config_error(origin, 0, "G_over_omega_m cannot be both swept and resonant");

  using K = ScenarioKind;
  using S = SolverKind;
  std::vector<S> allowed;
  switch (s.kind) {
    case K::linear_sweep:
    case K::bath_occupancy_sweep:
    case K::classical_check: allowed = {S::linear}; break;
    case K::cooperativity_sweep: allowed = {S::leading, S::self_consistent}; break;
    case K::instability_scan: allowed = {S::leading}; break;
    case K::two_phonon: allowed = {S::linear, S::leading, S::self_consistent}; break;
    case K::spectrum_point:
    case K::flux_vs_G: allowed = {S::linear, S::leading, S::self_consistent, S::lindblad}; break;
  }
  if (!have_solver) {
    if (allowed.size() != 1) config_error(origin, 0, "missing `solver`");
    s.solver = allowed[0];
  }
  if (std::find(allowed.begin(), allowed.end(), s.solver) == allowed.end())
    config_error(origin, 0,
                 std::string("solver `") + to_string(s.solver) + "` is not available for " + to_string(s.kind));
  if (!(s.iteration.mixing > 0.0 && s.iteration.mixing <= 1.0)) config_error(origin, 0, "mixing must lie in (0, 1]");
  if (s.iteration.max_iterations < 1) config_error(origin, 0, "iterations must be at least 1");

  if (s.name.empty()) {
    s.name = origin == "<string>" ? std::string(to_string(s.kind)) : std::filesystem::path(origin).stem().string();
  }
  if (s.csv_name.empty()) s.csv_name = s.name + ".csv";
  if (s.json_name.empty()) s.json_name = s.name + ".json";
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::config, "cannot open scenario file `" + path + "`");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), path);
}

void validate_scenario(const Scenario& s) {
  for (std::size_t i = 0; i < s.points(); ++i) {
    try {
      const SystemParams p(s.point(i));
      if (s.solver != SolverKind::lindblad) continue;
      const Model m = make_model(p);
      LindbladOptions lo = s.lindblad;
      if (s.lindblad_auto_levels) {
        const auto lv = predicted_levels(m);
        const double dim = static_cast<double>(lv[0]) * static_cast<double>(lv[1]);
        if (dim > static_cast<double>(lo.max_hilbert_dimension)) {
          std::ostringstream os;
          os << "Lindblad truncation needs " << lv[0] << " x " << lv[1] << " levels, above the dimension cap "
             << lo.max_hilbert_dimension << "; the oracle is out of range here";
          fail(ErrorCode::memory_budget, os.str());
        }
        lo.levels_minus = lv[0];
        lo.levels_plus = lv[1];
      }
      const std::size_t dim = static_cast<std::size_t>(lo.levels_minus) * static_cast<std::size_t>(lo.levels_plus);
      if (dim > lo.max_hilbert_dimension) fail(ErrorCode::memory_budget, "Lindblad dimension above the cap");
      for (Branch b : kBranches) {
        const double n = expected_occupancy(m, b);
        const int levels = b == Branch::minus ? lo.levels_minus : lo.levels_plus;
        if (!(n < levels / 5.0)) {
          std::ostringstream os;
          os << "Lindblad truncation of " << levels << " levels too small for expected " << branch_name(b)
             << " occupancy " << n;
          fail(ErrorCode::truncation, os.str());
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config) throw;
      std::ostringstream os;
      os << "point " << i;
      if (s.sweep != SweepVariable::none) os << " (" << to_string(s.sweep) << " = " << s.sweep_value(i) << ")";
      os << ": " << e.what();
      config_error(s.origin, 0, os.str());
    }
  }
}

}  // namespace omk
