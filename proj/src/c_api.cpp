#include "omk/omk.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "omk/classical.hpp"
#include "omk/error.hpp"
#include "omk/keldysh.hpp"
#include "omk/lindblad.hpp"
#include "omk/model.hpp"
#include "omk/scenario.hpp"
#include "omk/spectrum.hpp"

struct omk_model {
  omk::Model model;
};

struct omk_solution {
  omk::PolaritonBasis basis;
  omk::GreenFunctionSet green;
  omk::ConvergenceReport report;
};

struct omk_scenario {
  omk::Scenario scenario;
};

namespace {

thread_local std::string last_error;

omk_status status_of(omk::ErrorCode c) { return static_cast<omk_status>(static_cast<int>(c)); }

template <class F>
omk_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return OMK_OK;
  } catch (const omk::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return OMK_MEMORY_BUDGET;
  } catch (const std::exception& e) {
    last_error = e.what();
    return OMK_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return OMK_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) omk::fail(omk::ErrorCode::invalid_argument, what);
}

omk::Branch branch_of(omk_branch b) {
  require(b == OMK_MINUS || b == OMK_PLUS, "unknown branch");
  return b == OMK_MINUS ? omk::Branch::minus : omk::Branch::plus;
}

omk::ParamValues values_of(const omk_params& p) {
  omk::ParamValues v;
  v.detuning = p.detuning;
  v.mech_freq = p.mech_freq;
  v.drive_coupling = p.drive_coupling;
  v.single_photon_coupling = p.single_photon_coupling;
  v.cavity_damping = p.cavity_damping;
  v.mech_damping = p.mech_damping;
  v.mech_bath_occupancy = p.mech_bath_occupancy;
  require(p.bath == OMK_BATH_FLAT || p.bath == OMK_BATH_BOSE, "unknown bath model");
  v.bath = p.bath == OMK_BATH_FLAT ? omk::MechanicalBath::flat : omk::MechanicalBath::bose;
  return v;
}

omk::LindbladOptions lindblad_of(const omk::Model& m, const omk_lindblad_options* o) {
  omk_lindblad_options d;
  omk_lindblad_options_default(&d);
  const omk_lindblad_options& src = o ? *o : d;
  omk::LindbladOptions lo;
  const auto pred = omk::predicted_levels(m);
  lo.levels_minus = src.levels_minus > 0 ? src.levels_minus : pred[0];
  lo.levels_plus = src.levels_plus > 0 ? src.levels_plus : pred[1];
  lo.hamiltonian = src.hamiltonian == OMK_H_FULL ? omk::HamiltonianKind::full : omk::HamiltonianKind::resonant;
  lo.include_linear_terms = src.include_linear_terms != 0;
  lo.check_truncation = src.check_truncation != 0;
  lo.max_hilbert_dimension = src.max_hilbert_dimension;
  return lo;
}

}  // namespace

extern "C" {

const char* omk_version(void) { return omk::version(); }

const char* omk_last_error(void) { return last_error.c_str(); }

const char* omk_status_name(omk_status s) {
  if (s == OMK_OK) return "ok";
  if (s == OMK_INTERNAL) return "internal";
  if (s >= OMK_INVALID_ARGUMENT && s <= OMK_IO) return omk::error_code_name(static_cast<omk::ErrorCode>(s));
  return "unknown";
}

void omk_params_default(omk_params* p) {
  if (!p) return;
  const omk::ParamValues v;
  *p = {v.detuning, v.mech_freq, v.drive_coupling, v.single_photon_coupling, v.cavity_damping,
        v.mech_damping, v.mech_bath_occupancy, OMK_BATH_FLAT};
}

void omk_solve_options_default(omk_solve_options* o) {
  if (!o) return;
  const omk::WindowOptions w;
  const omk::SolverOptions s;
  *o = {OMK_SOLVER_LEADING, w.half_width_factor, w.resolution, w.min_points, w.max_points,
        s.max_iterations,   s.mixing,            s.tolerance};
}

void omk_lindblad_options_default(omk_lindblad_options* o) {
  if (!o) return;
  const omk::LindbladOptions l;
  *o = {0, 0, OMK_H_RESONANT, 0, 1, l.max_hilbert_dimension};
}

omk_status omk_critical_coupling(double detuning, double mech_freq, double* out) {
  return guard([&] {
    require(out, "null output");
    *out = omk::critical_coupling(detuning, mech_freq);
  });
}

omk_status omk_resonant_coupling(double detuning, double mech_freq, double* out) {
  return guard([&] {
    require(out, "null output");
    *out = omk::resonant_coupling(detuning, mech_freq);
  });
}

omk_status omk_model_create(const omk_params* p, omk_model** out) {
  return guard([&] {
    require(p && out, "null argument");
    *out = nullptr;
    const omk::SystemParams sp(values_of(*p));
    *out = new omk_model{omk::make_model(sp)};
  });
}

void omk_model_destroy(omk_model* m) { delete m; }

omk_status omk_model_polariton(const omk_model* m, omk_branch b, omk_polariton* out) {
  return guard([&] {
    require(m && out, "null argument");
    const omk::Polariton& p = m->model.basis[branch_of(b)];
    *out = {p.energy, p.alpha_d, p.alpha_d_bar, p.alpha_b, p.alpha_b_bar};
  });
}

omk_status omk_model_dissipation(const omk_model* m, omk_branch b, omk_dissipation* out) {
  return guard([&] {
    require(m && out, "null argument");
    const omk::BranchDissipation& d = m->model.dissipation[branch_of(b)];
    *out = {d.kappa,
            d.kappa_mech,
            d.kappa_cav,
            d.occupancy,
            d.temperature.value,
            d.cavity_occupancy,
            d.cavity_temperature.value,
            d.temperature.capped ? 1 : 0};
  });
}

omk_status omk_model_couplings(const omk_model* m, omk_couplings* out) {
  return guard([&] {
    require(m && out, "null argument");
    const omk::NonlinearCouplings& c = m->model.couplings;
    *out = {c.g_tilde, c.g_a_sum, c.a[0], c.a[1]};
  });
}

omk_status omk_model_cooperativities(const omk_model* m, double* c_minus, double* c_plus) {
  return guard([&] {
    require(m && c_minus && c_plus, "null argument");
    const auto c = omk::cooperativities(omk::bare_lines(m->model), m->model.couplings.g_tilde);
    *c_minus = c.minus;
    *c_plus = c.plus;
  });
}

omk_status omk_model_leading_occupancy(const omk_model* m, omk_branch b, double* out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = omk::leading_peak_occupancy(omk::bare_lines(m->model), m->model.couplings.g_tilde, branch_of(b));
  });
}

omk_status omk_model_instability(const omk_model* m, omk_instability* out) {
  return guard([&] {
    require(m && out, "null argument");
    const omk::InstabilityReport r = omk::instability_report(m->model);
    *out = {r.c_minus,
            r.negative_damping ? 1 : 0,
            r.near_threshold ? 1 : 0,
            r.unstable ? 1 : 0,
            r.threshold_occupancy,
            r.leading_minus_occupancy,
            r.paramp_minus_occupancy};
  });
}

omk_status omk_model_two_phonon_peak(const omk_model* m, int include_optical_damping, double* center, double* width,
                                     double* height, double* weight) {
  return guard([&] {
    require(m, "null model");
    const omk::TwoPhononPeak pk = omk::two_phonon_peak(m->model.params, include_optical_damping != 0);
    if (center) *center = pk.center;
    if (width) *width = pk.width;
    if (height) *height = pk.height;
    if (weight) *weight = pk.integrated_weight();
  });
}

omk_status omk_model_classical_weight(const omk_model* m, double* fixed_amplitude, double* thermal) {
  return guard([&] {
    require(m, "null model");
    if (fixed_amplitude) *fixed_amplitude = omk::classical_spectrum(m->model.params).weight;
    if (thermal) *thermal = omk::thermal_two_phonon_weight(m->model.params);
  });
}

omk_status omk_solve(const omk_model* m, const omk_solve_options* o, omk_solution** out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = nullptr;
    omk_solve_options d;
    omk_solve_options_default(&d);
    const omk_solve_options& so = o ? *o : d;
    omk::WindowOptions wo;
    wo.half_width_factor = so.half_width_factor;
    wo.resolution = so.resolution;
    wo.min_points = so.min_points;
    wo.max_points = so.max_points;
    const omk::WindowPlan plan = omk::plan_windows(m->model, wo);
    auto sol = std::make_unique<omk_solution>(
        omk_solution{m->model.basis, omk::bare_green(m->model, plan), omk::ConvergenceReport{}});
    if (so.solver == OMK_SOLVER_LEADING) {
      sol->green = omk::dyson_solve(sol->green, omk::leading_self_energy(m->model, plan));
      sol->report.converged = true;
      sol->report.unresolved = sol->green.unresolved;
    } else if (so.solver == OMK_SOLVER_SELF_CONSISTENT) {
      omk::SolverOptions it;
      it.max_iterations = so.max_iterations;
      it.mixing = so.mixing;
      it.tolerance = so.tolerance;
      omk::SelfConsistentResult r = omk::self_consistent_solve(m->model, plan, it);
      sol->green = std::move(r.green);
      sol->report = std::move(r.report);
    } else {
      omk::fail(omk::ErrorCode::invalid_argument, "unknown solver");
    }
    *out = sol.release();
  });
}

void omk_solution_destroy(omk_solution* s) { delete s; }

omk_status omk_solution_report(const omk_solution* s, omk_report* out) {
  return guard([&] {
    require(s && out, "null argument");
    const auto& r = s->report;
    *out = {r.converged ? 1 : 0, r.iterations, r.unresolved ? 1 : 0, r.deltas.empty() ? 0.0 : r.deltas.back()};
  });
}

omk_status omk_solution_window(const omk_solution* s, omk_branch b, omk_window* out) {
  return guard([&] {
    require(s && out, "null argument");
    const omk::FrequencyWindow& w = s->green[branch_of(b)].window;
    *out = {w.spacing, static_cast<long long>(w.first), w.size};
  });
}

omk_status omk_solution_dos(const omk_solution* s, omk_branch b, double* out, size_t n) {
  return guard([&] {
    require(s && out, "null argument");
    const auto dos = omk::polariton_dos(s->green)[omk::idx(branch_of(b))];
    require(n == dos.size(), "buffer size does not match the window");
    std::memcpy(out, dos.data(), n * sizeof(double));
  });
}

omk_status omk_solution_distribution(const omk_solution* s, omk_branch b, double* out, size_t n) {
  return guard([&] {
    require(s && out, "null argument");
    const auto dist = omk::distribution_function(s->green)[omk::idx(branch_of(b))];
    require(n == dist.occupancy.size(), "buffer size does not match the window");
    std::memcpy(out, dist.occupancy.data(), n * sizeof(double));
  });
}

omk_status omk_solution_occupancy(const omk_solution* s, omk_branch b, double* out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = omk::polariton_occupancy(s->green, branch_of(b));
  });
}

omk_status omk_solution_flux(const omk_solution* s, double center, double half_width, double* out) {
  return guard([&] {
    require(s && out, "null argument");
    const omk::SpectrumResult S = omk::cavity_spectrum(s->basis, s->green, center, half_width + s->green.spacing);
    *out = omk::integrated_flux(S, center, half_width);
  });
}

omk_status omk_solution_spectrum_size(const omk_solution* s, double half_width, size_t* out) {
  return guard([&] {
    require(s && out, "null argument");
    const omk::SpectrumResult S = omk::cavity_spectrum(s->basis, s->green, 0.0, half_width);
    *out = S.frequency.size();
  });
}

omk_status omk_solution_spectrum(const omk_solution* s, double center, double half_width, double* frequency,
                                 double* emission, double* density, size_t n) {
  return guard([&] {
    require(s, "null solution");
    const omk::SpectrumResult S = omk::cavity_spectrum(s->basis, s->green, center, half_width);
    require(n == S.frequency.size(), "buffer size does not match the band");
    if (frequency) std::memcpy(frequency, S.frequency.data(), n * sizeof(double));
    if (emission) std::memcpy(emission, S.emission.data(), n * sizeof(double));
    if (density) std::memcpy(density, S.density.data(), n * sizeof(double));
  });
}

omk_status omk_lindblad_solve(const omk_model* m, const omk_lindblad_options* o, omk_lindblad_result* out) {
  return guard([&] {
    require(m && out, "null argument");
    const omk::LiouvillianModel L(m->model, lindblad_of(m->model, o));
    const omk::SteadyState ss = omk::steady_state(L);
    *out = {ss.occupancy(L, omk::Branch::minus),
            ss.occupancy(L, omk::Branch::plus),
            ss.residual,
            ss.tail_mass,
            ss.tail_flag ? 1 : 0,
            L.levels(omk::Branch::minus),
            L.levels(omk::Branch::plus)};
  });
}

omk_status omk_lindblad_spectrum(const omk_model* m, const omk_lindblad_options* o, const double* frequency,
                                 double* emission, size_t n) {
  return guard([&] {
    require(m && frequency && emission, "null argument");
    const omk::LiouvillianModel L(m->model, lindblad_of(m->model, o));
    const omk::SteadyState ss = omk::steady_state(L);
    const omk::RegressionSpectrum rs = omk::regression_spectrum(L, ss, std::vector<double>(frequency, frequency + n));
    std::memcpy(emission, rs.emission.data(), n * sizeof(double));
  });
}

omk_status omk_scenario_load(const char* path, omk_scenario** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = nullptr;
    *out = new omk_scenario{omk::load_scenario(path)};
  });
}

omk_status omk_scenario_parse(const char* text, omk_scenario** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = nullptr;
    *out = new omk_scenario{omk::parse_scenario(text)};
  });
}

void omk_scenario_destroy(omk_scenario* s) { delete s; }

omk_status omk_scenario_validate(const omk_scenario* s) {
  return guard([&] {
    require(s, "null scenario");
    omk::validate_scenario(s->scenario);
  });
}

size_t omk_scenario_points(const omk_scenario* s) { return s ? s->scenario.points() : 0; }

omk_status omk_scenario_run(const omk_scenario* s, const omk_run_options* o, omk_run_result* out) {
  return guard([&] {
    require(s, "null scenario");
    omk::RunOptions ro;
    if (o) {
      if (o->out_dir) ro.out_dir = o->out_dir;
      ro.workers = o->workers > 0 ? o->workers : 1;
      ro.seed_check = o->seed_check != 0;
    }
    const omk::RunResult r = omk::run_scenario(s->scenario, ro);
    if (out) *out = {r.points, r.soft_failures, r.seed_check_passed ? 1 : 0};
  });
}

}  // extern "C"
