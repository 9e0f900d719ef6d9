#ifndef OMK_OMK_H
#define OMK_OMK_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(OMK_BUILDING_LIBRARY)
#    define OMK_API __declspec(dllexport)
#  else
#    define OMK_API __declspec(dllimport)
#  endif
#else
#  define OMK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Frequencies and rates are in units of the cavity damping kappa. */

typedef enum omk_status {
  OMK_OK = 0,
  OMK_INVALID_ARGUMENT = 1,
  OMK_DOMAIN = 2,
  OMK_WINDOW_MISMATCH = 3,
  OMK_POLE_ON_GRID = 4,
  OMK_TRUNCATION = 5,
  OMK_MEMORY_BUDGET = 6,
  OMK_CONVERGENCE = 7,
  OMK_NUMERIC = 8,
  OMK_CONFIG = 9,
  OMK_IO = 10,
  OMK_INTERNAL = 99
} omk_status;

typedef enum omk_branch { OMK_MINUS = 0, OMK_PLUS = 1 } omk_branch;
typedef enum omk_bath { OMK_BATH_FLAT = 0, OMK_BATH_BOSE = 1 } omk_bath;
typedef enum omk_solver { OMK_SOLVER_LEADING = 0, OMK_SOLVER_SELF_CONSISTENT = 1 } omk_solver;
typedef enum omk_hamiltonian { OMK_H_RESONANT = 0, OMK_H_FULL = 1 } omk_hamiltonian;

typedef struct omk_model omk_model;
typedef struct omk_solution omk_solution;
typedef struct omk_scenario omk_scenario;

typedef struct omk_params {
  double detuning;
  double mech_freq;
  double drive_coupling;
  double single_photon_coupling;
  double cavity_damping; /* must be 1 */
  double mech_damping;
  double mech_bath_occupancy;
  omk_bath bath;
} omk_params;

typedef struct omk_polariton {
  double energy;
  double alpha_d;
  double alpha_d_bar;
  double alpha_b;
  double alpha_b_bar;
} omk_polariton;

typedef struct omk_dissipation {
  double kappa;
  double kappa_mech;
  double kappa_cav;
  double occupancy;
  double temperature;
  double cavity_occupancy;
  double cavity_temperature;
  int temperature_capped;
} omk_dissipation;

typedef struct omk_couplings {
  double g_tilde;
  double g_a_sum;
  double a_minus;
  double a_plus;
} omk_couplings;

typedef struct omk_instability {
  double c_minus;
  int negative_damping;
  int near_threshold;
  int unstable;
  double threshold_occupancy;
  double leading_minus_occupancy;
  double paramp_minus_occupancy;
} omk_instability;

typedef struct omk_solve_options {
  omk_solver solver;
  double half_width_factor;
  double resolution;
  size_t min_points;
  size_t max_points;
  int max_iterations;
  double mixing;
  double tolerance;
} omk_solve_options;

typedef struct omk_report {
  int converged;
  int iterations;
  int unresolved;
  double last_delta;
} omk_report;

typedef struct omk_window {
  double spacing;
  long long first;
  size_t size;
} omk_window;

typedef struct omk_lindblad_options {
  int levels_minus; /* 0 picks the predicted truncation */
  int levels_plus;
  omk_hamiltonian hamiltonian;
  int include_linear_terms;
  int check_truncation;
  size_t max_hilbert_dimension;
} omk_lindblad_options;

typedef struct omk_lindblad_result {
  double occupancy_minus;
  double occupancy_plus;
  double residual;
  double tail_mass;
  int tail_flag;
  int levels_minus;
  int levels_plus;
} omk_lindblad_result;

typedef struct omk_run_options {
  const char* out_dir;
  int workers;
  int seed_check;
} omk_run_options;

typedef struct omk_run_result {
  size_t points;
  size_t soft_failures;
  int seed_check_passed;
} omk_run_result;

OMK_API const char* omk_version(void);
/* Message of the last failed call on this thread. */
OMK_API const char* omk_last_error(void);
OMK_API const char* omk_status_name(omk_status s);

OMK_API void omk_params_default(omk_params* p);
OMK_API void omk_solve_options_default(omk_solve_options* o);
OMK_API void omk_lindblad_options_default(omk_lindblad_options* o);

OMK_API omk_status omk_critical_coupling(double detuning, double mech_freq, double* out);
OMK_API omk_status omk_resonant_coupling(double detuning, double mech_freq, double* out);

OMK_API omk_status omk_model_create(const omk_params* p, omk_model** out);
OMK_API void omk_model_destroy(omk_model* m);
OMK_API omk_status omk_model_polariton(const omk_model* m, omk_branch b, omk_polariton* out);
OMK_API omk_status omk_model_dissipation(const omk_model* m, omk_branch b, omk_dissipation* out);
OMK_API omk_status omk_model_couplings(const omk_model* m, omk_couplings* out);
OMK_API omk_status omk_model_cooperativities(const omk_model* m, double* c_minus, double* c_plus);
OMK_API omk_status omk_model_leading_occupancy(const omk_model* m, omk_branch b, double* out);
OMK_API omk_status omk_model_instability(const omk_model* m, omk_instability* out);
OMK_API omk_status omk_model_two_phonon_peak(const omk_model* m, int include_optical_damping, double* center,
                                             double* width, double* height, double* weight);
OMK_API omk_status omk_model_classical_weight(const omk_model* m, double* fixed_amplitude, double* thermal);

OMK_API omk_status omk_solve(const omk_model* m, const omk_solve_options* o, omk_solution** out);
OMK_API void omk_solution_destroy(omk_solution* s);
OMK_API omk_status omk_solution_report(const omk_solution* s, omk_report* out);
OMK_API omk_status omk_solution_window(const omk_solution* s, omk_branch b, omk_window* out);
/* Arrays have omk_window.size entries. */
OMK_API omk_status omk_solution_dos(const omk_solution* s, omk_branch b, double* out, size_t n);
OMK_API omk_status omk_solution_distribution(const omk_solution* s, omk_branch b, double* out, size_t n);
OMK_API omk_status omk_solution_occupancy(const omk_solution* s, omk_branch b, double* out);
OMK_API omk_status omk_solution_flux(const omk_solution* s, double center, double half_width, double* out);
/* Cavity emission on omk_spectrum_size(half_width) points centred on the grid point nearest to center. */
OMK_API omk_status omk_solution_spectrum_size(const omk_solution* s, double half_width, size_t* out);
OMK_API omk_status omk_solution_spectrum(const omk_solution* s, double center, double half_width, double* frequency,
                                         double* emission, double* density, size_t n);

OMK_API omk_status omk_lindblad_solve(const omk_model* m, const omk_lindblad_options* o, omk_lindblad_result* out);
OMK_API omk_status omk_lindblad_spectrum(const omk_model* m, const omk_lindblad_options* o, const double* frequency,
                                         double* emission, size_t n);

OMK_API omk_status omk_scenario_load(const char* path, omk_scenario** out);
OMK_API omk_status omk_scenario_parse(const char* text, omk_scenario** out);
OMK_API void omk_scenario_destroy(omk_scenario* s);
OMK_API omk_status omk_scenario_validate(const omk_scenario* s);
OMK_API size_t omk_scenario_points(const omk_scenario* s);
OMK_API omk_status omk_scenario_run(const omk_scenario* s, const omk_run_options* o, omk_run_result* out);

#ifdef __cplusplus
}
#endif

#endif
