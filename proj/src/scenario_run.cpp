#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "omk/classical.hpp"
#include "omk/error.hpp"
#include "omk/scenario.hpp"
#include "omk/spectrum.hpp"

namespace omk {

namespace {

using json = nlohmann::ordered_json;

struct Cell {
  std::optional<double> number;
  std::string text;
  static Cell of(double v) { return {v, {}}; }
  static Cell str(std::string s) { return {std::nullopt, std::move(s)}; }
  static Cell empty() { return {}; }
};

using Row = std::vector<Cell>;

struct PointOutcome {
  std::vector<Row> rows;
  json diagnostics = json::object();
  bool soft_failure = false;
  bool hard_failure = false;
  std::string message;
};

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json json_number(double v) {
  if (std::isfinite(v)) return std::stod(format_number(v));
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::string sweep_column(const Scenario& s) {
  switch (s.sweep) {
    case SweepVariable::detuning: return "delta_over_omega_m[1]";
    case SweepVariable::drive: return "G_over_omega_m[1]";
    case SweepVariable::bath_occupancy: return "n_th[1]";
    case SweepVariable::single_photon_coupling: return "g[kappa]";
    case SweepVariable::none: break;
  }
  return "";
}

std::vector<std::string> columns(const Scenario& s) {
  std::vector<std::string> c{"solver"};
  const std::string sw = sweep_column(s);
  if (!sw.empty()) c.push_back(sw);
  auto add = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) c.emplace_back(n);
  };
  switch (s.kind) {
    case ScenarioKind::linear_sweep:
      add({"delta[kappa]", "G[kappa]", "E_minus[kappa]", "E_plus[kappa]", "alpha_d_minus[1]", "alpha_d_bar_minus[1]",
           "alpha_b_minus[1]", "alpha_b_bar_minus[1]", "alpha_d_plus[1]", "alpha_d_bar_plus[1]", "alpha_b_plus[1]",
           "alpha_b_bar_plus[1]", "g_tilde[kappa]", "gA_sum[kappa]", "A_minus[kappa]", "A_plus[kappa]"});
      break;
    case ScenarioKind::bath_occupancy_sweep:
      add({"delta[kappa]", "G[kappa]", "kappa_minus[kappa]", "kappa_plus[kappa]", "kappa_mech_minus[kappa]",
           "kappa_mech_plus[kappa]", "kappa_cav_minus[kappa]", "kappa_cav_plus[kappa]", "n0_minus[1]", "n0_plus[1]",
           "T0_minus[kappa]", "T0_plus[kappa]", "n_cav_minus[1]", "n_cav_plus[1]", "T_cav_minus[kappa]",
           "T_cav_plus[kappa]", "n0_minus_near_2wm[1]"});
      break;
    case ScenarioKind::cooperativity_sweep:
      add({"delta[kappa]", "G[kappa]", "g_tilde[kappa]", "C_minus[1]", "C_plus[1]", "n_int_minus[1]", "n_int_plus[1]",
           "n_eff_minus_at_E[1]", "n_eff_plus_at_E[1]", "occupancy_minus[1]", "occupancy_plus[1]", "converged[1]",
           "iterations[1]"});
      break;
    case ScenarioKind::instability_scan:
      add({"delta[kappa]", "G[kappa]", "g_tilde[kappa]", "C_minus[1]", "negative_damping[1]", "near_threshold[1]",
           "unstable[1]", "threshold_occupancy[1]", "n0_plus[1]", "n_eff_minus_leading[1]", "n_eff_minus_paramp[1]"});
      break;
    case ScenarioKind::flux_vs_G:
      add({"G[kappa]", "resonance_offset[kappa]", "flux_minus[1]", "flux_plus[1]", "linear_minus[1]", "linear_plus[1]",
           "linear_band_minus[1]", "linear_band_plus[1]"});
      break;
    case ScenarioKind::spectrum_point:
      add({"block", "omega[kappa]", "rho_d[1/kappa]", "S_d[1/kappa]", "n_eff_d[1]", "T_eff_d[kappa]"});
      break;
    case ScenarioKind::two_phonon:
      add({"omega[kappa]", "S_peak_formula[1/kappa]", "S_d[1/kappa]", "rho_d[1/kappa]"});
      break;
    case ScenarioKind::classical_check:
      add({"G[kappa]", "epsilon_mean[1]", "classical_weight[1]", "bessel_thermal_weight[1]",
           "peak_weight_no_damping[1]", "peak_weight[1]"});
      break;
  }
  return c;
}

json convergence_json(const ConvergenceReport& r) {
  json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["unresolved"] = r.unresolved;
  json d = json::array();
  for (double x : r.deltas) d.push_back(json_number(x));
  j["deltas"] = d;
  j["message"] = r.message;
  return j;
}

// Green functions of the requested Keldysh-family solver.
struct Solved {
  GreenFunctionSet green;
  std::optional<SelfEnergySet> sigma;
  std::optional<ConvergenceReport> report;
};

Solved solve_green(const Scenario& s, const Model& m) {
  const WindowPlan plan = plan_windows(m, s.windows);
  Solved out{bare_green(m, plan), std::nullopt, std::nullopt};
  if (s.solver == SolverKind::leading) {
    SelfEnergySet sig = leading_self_energy(m, plan);
    out.green = dyson_solve(out.green, sig);
    out.sigma = std::move(sig);
  } else if (s.solver == SolverKind::self_consistent) {
    SelfConsistentResult r = self_consistent_solve(m, plan, s.iteration);
    out.green = std::move(r.green);
    out.sigma = std::move(r.self_energy);
    out.report = std::move(r.report);
  }
  return out;
}

struct LindbladRun {
  LiouvillianModel model;
  SteadyState state;
};

LindbladRun solve_lindblad(const Scenario& s, const Model& m) {
  LindbladOptions lo = s.lindblad;
  if (s.lindblad_auto_levels) {
    const auto lv = predicted_levels(m);
    lo.levels_minus = lv[0];
    lo.levels_plus = lv[1];
  }
  LiouvillianModel L(m, lo);
  SteadyState ss = steady_state(L);
  return {std::move(L), std::move(ss)};
}

json lindblad_json(const LindbladRun& r) {
  json j;
  j["levels_minus"] = r.model.levels(Branch::minus);
  j["levels_plus"] = r.model.levels(Branch::plus);
  j["hamiltonian"] = r.model.hamiltonian_kind() == HamiltonianKind::resonant ? "resonant" : "full";
  j["residual"] = json_number(r.state.residual);
  j["tail_mass"] = json_number(r.state.tail_mass);
  j["tail_flag"] = r.state.tail_flag;
  j["min_eigenvalue"] = json_number(r.state.min_eigenvalue);
  j["occupancy_minus"] = json_number(r.state.occupancy(r.model, Branch::minus));
  j["occupancy_plus"] = json_number(r.state.occupancy(r.model, Branch::plus));
  return j;
}

std::vector<double> frequency_grid(double lo, double hi, double step) {
  std::vector<double> w;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) w.push_back(lo + step * static_cast<double>(i));
  return w;
}

double trapezoid_flux(const std::vector<double>& w, const std::vector<double>& S) {
  double acc = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) acc += 0.5 * (w[i] - w[i - 1]) * (S[i] + S[i - 1]);
  return acc / (2.0 * 3.14159265358979323846);
}

Row prefix(const Scenario& s, std::size_t i) {
  Row r{Cell::str(to_string(s.solver))};
  if (s.sweep != SweepVariable::none) r.push_back(Cell::of(s.sweep_value(i)));
  return r;
}

PointOutcome evaluate(const Scenario& s, std::size_t i) {
  PointOutcome out;
  Row row = prefix(s, i);
  const ParamValues pv = s.point(i);
  const SystemParams p(pv);
  const Model m = make_model(p);
  const PolaritonBasis& B = m.basis;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto num = [&](double v) { row.push_back(Cell::of(v)); };
  const double E_m = B[Branch::minus].energy, E_p = B[Branch::plus].energy;

  switch (s.kind) {
    case ScenarioKind::linear_sweep: {
      num(pv.detuning);
      num(pv.drive_coupling);
      num(E_m);
      num(E_p);
      for (Branch b : kBranches) {
        num(B[b].alpha_d);
        num(B[b].alpha_d_bar);
        num(B[b].alpha_b);
        num(B[b].alpha_b_bar);
      }
      num(m.couplings.g_tilde);
      num(m.couplings.g_a_sum);
      num(m.couplings.a[0]);
      num(m.couplings.a[1]);
      break;
    }
    case ScenarioKind::bath_occupancy_sweep: {
      const LinearDissipation& d = m.dissipation;
      num(pv.detuning);
      num(pv.drive_coupling);
      num(d[Branch::minus].kappa);
      num(d[Branch::plus].kappa);
      num(d[Branch::minus].kappa_mech);
      num(d[Branch::plus].kappa_mech);
      num(d[Branch::minus].kappa_cav);
      num(d[Branch::plus].kappa_cav);
      num(d[Branch::minus].occupancy);
      num(d[Branch::plus].occupancy);
      num(d[Branch::minus].temperature.value);
      num(d[Branch::plus].temperature.value);
      num(d[Branch::minus].cavity_occupancy);
      num(d[Branch::plus].cavity_occupancy);
      num(d[Branch::minus].cavity_temperature.value);
      num(d[Branch::plus].cavity_temperature.value);
      num(near_2wm_occupancy(p));
      bool capped = false;
      for (Branch b : kBranches) capped = capped || d[b].temperature.capped || d[b].cavity_temperature.capped;
      if (capped) out.diagnostics["temperature_capped"] = true;
      break;
    }
    case ScenarioKind::cooperativity_sweep: {
      num(pv.detuning);
      num(pv.drive_coupling);
      num(m.couplings.g_tilde);
      const LinePair lines = bare_lines(m);
      if (s.solver == SolverKind::leading) {
        const Cooperativities c = cooperativities(lines, m.couplings.g_tilde);
        const InteractionOccupancies n = interaction_occupancies(lines);
        num(c.minus);
        num(c.plus);
        num(n.minus);
        num(n.plus);
        num(leading_peak_occupancy(lines, m.couplings.g_tilde, Branch::minus));
        num(leading_peak_occupancy(lines, m.couplings.g_tilde, Branch::plus));
        row.push_back(Cell::empty());
        row.push_back(Cell::empty());
        row.push_back(Cell::empty());
        row.push_back(Cell::empty());
        if (n.minus_divergent) out.diagnostics["n_int_minus_divergent"] = true;
        break;
      }
      const Solved sv = solve_green(s, m);
      const GreenFunctionSet bare = bare_green(lines, plan_windows(m, s.windows));
      const Cooperativities c = effective_cooperativities(*sv.sigma, bare);
      num(c.minus);
      num(c.plus);
      const double h = sv.green.spacing;
      const std::int64_t jm = std::llround(E_m / h), jp = std::llround(E_p / h);
      auto nint_at = [&](Branch b, std::int64_t j) {
        const BranchSelfEnergy& se = (*sv.sigma)[b];
        if (!se.window.contains(j)) return nan;
        return se.interaction_occupancy()[se.window.offset(j)];
      };
      num(nint_at(Branch::minus, jp - jm));
      num(nint_at(Branch::plus, 2 * jm));
      num(distribution_at(sv.green, Branch::minus, jm));
      num(distribution_at(sv.green, Branch::plus, jp));
      num(polariton_occupancy(sv.green, Branch::minus));
      num(polariton_occupancy(sv.green, Branch::plus));
      num(sv.report->converged ? 1.0 : 0.0);
      num(sv.report->iterations);
      out.diagnostics["convergence"] = convergence_json(*sv.report);
      break;
    }
    case ScenarioKind::instability_scan: {
      const InstabilityReport r = instability_report(m);
      num(pv.detuning);
      num(pv.drive_coupling);
      num(m.couplings.g_tilde);
      num(r.c_minus);
      num(r.negative_damping ? 1.0 : 0.0);
      num(r.near_threshold ? 1.0 : 0.0);
      num(r.unstable ? 1.0 : 0.0);
      num(r.threshold_occupancy);
      num(m.dissipation[Branch::plus].occupancy);
      num(r.leading_minus_occupancy);
      num(r.paramp_minus_occupancy);
      break;
    }
    case ScenarioKind::flux_vs_G: {
      num(pv.drive_coupling);
      num(E_p - 2.0 * E_m);
      double fm = nan, fp = nan;
      if (s.solver == SolverKind::lindblad) {
        const LindbladRun lr = solve_lindblad(s, m);
        for (Branch b : kBranches) {
          const double c = B[b].energy;
          const auto w = frequency_grid(c - s.band_half_width, c + s.band_half_width, s.lindblad_step);
          const RegressionSpectrum rs = regression_spectrum(lr.model, lr.state, w);
          (b == Branch::minus ? fm : fp) = trapezoid_flux(w, rs.emission);
        }
        out.diagnostics["lindblad"] = lindblad_json(lr);
      } else {
        const Solved sv = solve_green(s, m);
        for (Branch b : kBranches) {
          const SpectrumResult S = cavity_spectrum(B, sv.green, B[b].energy, s.band_half_width + sv.green.spacing);
          (b == Branch::minus ? fm : fp) = integrated_flux(S, B[b].energy, s.band_half_width);
        }
        if (sv.report) out.diagnostics["convergence"] = convergence_json(*sv.report);
      }
      num(fm);
      num(fp);
      num(linear_line_flux(m, Branch::minus));
      num(linear_line_flux(m, Branch::plus));
      num(linear_band_flux(m, Branch::minus, s.band_half_width));
      num(linear_band_flux(m, Branch::plus, s.band_half_width));
      break;
    }
    case ScenarioKind::spectrum_point: {
      const double hw = s.spectrum_half_width;
      if (s.solver == SolverKind::lindblad) {
        const LindbladRun lr = solve_lindblad(s, m);
        for (Branch b : kBranches) {
          const auto w = frequency_grid(B[b].energy - hw, B[b].energy + hw, s.lindblad_step);
          const RegressionSpectrum rs = regression_spectrum(lr.model, lr.state, w);
          for (std::size_t k = 0; k < w.size(); ++k) {
            Row r = prefix(s, i);
            r.push_back(Cell::str(branch_name(b)));
            r.push_back(Cell::of(w[k]));
            r.push_back(Cell::empty());
            r.push_back(Cell::of(rs.emission[k]));
            r.push_back(Cell::empty());
            r.push_back(Cell::empty());
            out.rows.push_back(std::move(r));
          }
          out.diagnostics[std::string("flux_") + branch_name(b)] = json_number(trapezoid_flux(w, rs.emission));
        }
        out.diagnostics["lindblad"] = lindblad_json(lr);
        return out;
      }
      const Solved sv = solve_green(s, m);
      double consistency = 0.0;
      for (Branch b : kBranches) {
        const SpectrumResult S = cavity_spectrum(B, sv.green, B[b].energy, hw);
        for (std::size_t k = 0; k < S.frequency.size(); ++k) {
          Row r = prefix(s, i);
          r.push_back(Cell::str(branch_name(b)));
          r.push_back(Cell::of(S.frequency[k]));
          r.push_back(Cell::of(S.density[k]));
          r.push_back(Cell::of(S.emission[k]));
          r.push_back(Cell::of(S.occupancy[k]));
          r.push_back(Cell::of(S.temperature[k]));
          out.rows.push_back(std::move(r));
          if (!S.masked[k])
            consistency = std::max(consistency, std::abs(S.occupancy[k] * S.density[k] * 2.0 * 3.14159265358979323846 -
                                                         S.emission[k]));
        }
        const double band = std::min(s.band_half_width, hw);
        const SpectrumResult F = cavity_spectrum(B, sv.green, B[b].energy, band + sv.green.spacing);
        out.diagnostics[std::string("flux_") + branch_name(b)] = json_number(integrated_flux(F, B[b].energy, band));
        out.diagnostics[std::string("occupancy_") + branch_name(b)] = json_number(polariton_occupancy(sv.green, b));
      }
      out.diagnostics["emission_consistency_residual"] = json_number(consistency);
      if (sv.report) out.diagnostics["convergence"] = convergence_json(*sv.report);
      return out;
    }
    case ScenarioKind::two_phonon: {
      const TwoPhononPeak pk = two_phonon_peak(p);
      const Solved sv = solve_green(s, m);
      const SpectrumResult S = cavity_spectrum(B, sv.green, pk.center, s.spectrum_half_width);
      for (std::size_t k = 0; k < S.frequency.size(); ++k) {
        Row r = prefix(s, i);
        r.push_back(Cell::of(S.frequency[k]));
        r.push_back(Cell::of(pk.value(S.frequency[k])));
        r.push_back(Cell::of(S.emission[k]));
        r.push_back(Cell::of(S.density[k]));
        out.rows.push_back(std::move(r));
      }
      json w = json::array();
      for (const auto& x : pk.warnings) w.push_back(x);
      out.diagnostics["regime_warnings"] = w;
      out.diagnostics["optical_damping"] = json_number(pk.optical_damping);
      out.diagnostics["peak_width"] = json_number(pk.width);
      out.diagnostics["peak_height"] = json_number(pk.height);
      if (sv.report) out.diagnostics["convergence"] = convergence_json(*sv.report);
      return out;
    }
    case ScenarioKind::classical_check: {
      num(pv.drive_coupling);
      num(thermal_epsilon(p));
      const ClassicalPeak cp = classical_spectrum(p);
      num(cp.weight);
      num(thermal_two_phonon_weight(p));
      num(two_phonon_peak(p, false).integrated_weight());
      num(two_phonon_peak(p, true).integrated_weight());
      if (!cp.warnings.empty()) {
        json w = json::array();
        for (const auto& x : cp.warnings) w.push_back(x);
        out.diagnostics["validity_warnings"] = w;
      }
      break;
    }
  }
  out.rows.push_back(std::move(row));
  return out;
}

bool is_soft(ErrorCode c) {
  switch (c) {
    case ErrorCode::domain:
    case ErrorCode::window_mismatch:
    case ErrorCode::pole_on_grid:
    case ErrorCode::truncation:
    case ErrorCode::memory_budget:
    case ErrorCode::invalid_argument: return true;
    default: return false;
  }
}

PointOutcome evaluate_guarded(const Scenario& s, std::size_t i, std::size_t ncols) {
  try {
    return evaluate(s, i);
  } catch (const Error& e) {
    PointOutcome out;
    out.message = std::string(error_code_name(e.code())) + ": " + e.what();
    out.soft_failure = is_soft(e.code());
    out.hard_failure = !out.soft_failure;
    Row r = prefix(s, i);
    while (r.size() < ncols) r.push_back(Cell::empty());
    out.rows.push_back(std::move(r));
    return out;
  } catch (const std::exception& e) {
    PointOutcome out;
    out.message = std::string("internal: ") + e.what();
    out.hard_failure = true;
    Row r = prefix(s, i);
    while (r.size() < ncols) r.push_back(Cell::empty());
    out.rows.push_back(std::move(r));
    return out;
  }
}

std::string render_csv(const std::vector<std::string>& cols, const std::vector<PointOutcome>& pts) {
  std::string csv;
  for (std::size_t c = 0; c < cols.size(); ++c) csv += (c ? "," : "") + cols[c];
  csv += "\n";
  for (const PointOutcome& p : pts)
    for (const Row& r : p.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) csv += ",";
        csv += r[c].number ? format_number(*r[c].number) : r[c].text;
      }
      csv += "\n";
    }
  return csv;
}

}  // namespace

RenderedRun render_scenario(const Scenario& s, int workers) {
  const std::vector<std::string> cols = columns(s);
  const std::size_t n = s.points();
  std::vector<PointOutcome> results(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) results[i] = evaluate_guarded(s, i, cols.size());
  };
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  RenderedRun out;
  out.csv = render_csv(cols, results);

  json j;
  j["tool"] = "omk";
  j["version"] = version();
  j["scenario"] = {{"name", s.name}, {"kind", to_string(s.kind)}, {"solver", to_string(s.solver)},
                   {"sweep", to_string(s.sweep)}, {"points", n}};
  json settings = json::object();
  for (const auto& [k, v] : s.entries) settings[k] = v;
  j["settings"] = settings;
  const ParamValues& b = s.base;
  j["params"] = {{"units", "kappa"},
                 {"omega_m", json_number(s.omega_m)},
                 {"detuning", json_number(b.detuning)},
                 {"drive", s.resonant_drive ? json("resonant") : json_number(b.drive_coupling)},
                 {"g", json_number(b.single_photon_coupling)},
                 {"gamma", json_number(b.mech_damping)},
                 {"n_th", json_number(b.mech_bath_occupancy)},
                 {"bath_model", b.bath == MechanicalBath::flat ? "flat" : "bose"}};
  j["solver_settings"] = {{"window_half_width_factor", json_number(s.windows.half_width_factor)},
                          {"window_resolution", json_number(s.windows.resolution)},
                          {"window_min_points", s.windows.min_points},
                          {"window_max_points", s.windows.max_points},
                          {"iterations", s.iteration.max_iterations},
                          {"mixing", json_number(s.iteration.mixing)},
                          {"tolerance", json_number(s.iteration.tolerance)},
                          {"band_half_width", json_number(s.band_half_width)}};
  json pts = json::array();
  std::size_t soft = 0, hard = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const PointOutcome& r = results[i];
    json e;
    e["index"] = i;
    if (s.sweep != SweepVariable::none) e["sweep_value"] = json_number(s.sweep_value(i));
    e["status"] = r.hard_failure ? "hard_failure" : (r.soft_failure ? "soft_failure" : "ok");
    if (!r.message.empty()) e["message"] = r.message;
    e["diagnostics"] = r.diagnostics;
    pts.push_back(e);
    soft += r.soft_failure ? 1 : 0;
    hard += r.hard_failure ? 1 : 0;
  }
  j["points"] = pts;
  j["summary"] = {{"points", n}, {"soft_failures", soft}, {"hard_failures", hard}};
  out.json = j.dump(2) + "\n";
  out.soft_failures = soft;
  out.hard_failures = hard;
  for (const PointOutcome& r : results)
    if (r.hard_failure) {
      out.hard_message = std::to_string(hard) + " sweep point(s) failed hard; first: " + r.message;
      break;
    }
  return out;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  validate_scenario(s);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory `" + opt.out_dir + "`: " + ec.message());
  RunResult res;
  res.csv_path = (fs::path(opt.out_dir) / s.csv_name).string();
  res.json_path = (fs::path(opt.out_dir) / s.json_name).string();
  res.points = s.points();

  auto write = [](const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot write `" + path + "`");
    f << data;
    if (!f) fail(ErrorCode::io, "write to `" + path + "` failed");
  };

  const RenderedRun run = render_scenario(s, opt.workers);
  write(res.csv_path, run.csv);
  write(res.json_path, run.json);
  res.soft_failures = run.soft_failures;
  if (run.hard_failures > 0) fail(ErrorCode::numeric, run.hard_message);

  if (opt.seed_check) {
    const RenderedRun again = render_scenario(s, 1);
    res.seed_check_passed = again.csv == run.csv && again.json == run.json;
  }
  return res;
}

}  // namespace omk
