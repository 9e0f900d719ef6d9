#pragma once

#include <array>
#include <cstddef>

#include "omk/thermal.hpp"

namespace omk {

enum class Branch : std::size_t { minus = 0, plus = 1 };
inline constexpr std::array<Branch, 2> kBranches{Branch::minus, Branch::plus};
inline constexpr std::size_t idx(Branch b) { return static_cast<std::size_t>(b); }
const char* branch_name(Branch b);

// How the mechanical bath occupancy enters the polariton baths.
// flat: every polariton sees the occupancy n_th quoted at omega_M.
// bose: n_B evaluated at the polariton energy with T_M fixed by n_th at omega_M.
enum class MechanicalBath { flat, bose };

struct ParamValues {
  double detuning = -50.0;
  double mech_freq = 50.0;
  double drive_coupling = 0.0;
  double single_photon_coupling = 0.0;
  double cavity_damping = 1.0;
  double mech_damping = 1e-4;
  double mech_bath_occupancy = 0.0;
  MechanicalBath bath = MechanicalBath::flat;
};

// Validated physical knobs. All energies and rates in units of kappa.
class SystemParams {
 public:
  explicit SystemParams(const ParamValues& v);

  double detuning() const { return v_.detuning; }
  double mech_freq() const { return v_.mech_freq; }
  double drive_coupling() const { return v_.drive_coupling; }
  double single_photon_coupling() const { return v_.single_photon_coupling; }
  double cavity_damping() const { return v_.cavity_damping; }
  double mech_damping() const { return v_.mech_damping; }
  double mech_bath_occupancy() const { return v_.mech_bath_occupancy; }
  MechanicalBath bath() const { return v_.bath; }
  const ParamValues& values() const { return v_; }

  double critical_coupling() const;
  double mech_temperature() const;  // T_M from n_th at omega_M

 private:
  ParamValues v_;
};

double critical_coupling(double detuning, double mech_freq);

// Drive strength where E+ = 2 E-. Domain error outside [-2 wM, -wM/2].
double resonant_coupling(double detuning, double mech_freq);

struct PolaritonEnergies {
  double minus = 0.0;
  double plus = 0.0;
  double operator[](Branch b) const { return b == Branch::minus ? minus : plus; }
};

PolaritonEnergies polariton_energies(double detuning, double mech_freq, double drive_coupling);
PolaritonEnergies polariton_energies(const SystemParams& p);

// d = sum_s (alpha_d c_s + alpha_d_bar c_s^dag), likewise for b. Inverted,
// c = alpha_d d - alpha_d_bar d^dag + alpha_b b - alpha_b_bar b^dag.
struct Polariton {
  double energy = 0.0;
  double alpha_d = 0.0;
  double alpha_d_bar = 0.0;
  double alpha_b = 0.0;
  double alpha_b_bar = 0.0;
  double mech_overlap() const { return alpha_b + alpha_b_bar; }
};

struct PolaritonBasis {
  std::array<Polariton, 2> modes;
  const Polariton& operator[](Branch b) const { return modes[idx(b)]; }
  Polariton& operator[](Branch b) { return modes[idx(b)]; }
  PolaritonEnergies energies() const { return {modes[0].energy, modes[1].energy}; }
};

PolaritonBasis bogoliubov_coefficients(const SystemParams& p);
PolaritonBasis bogoliubov_coefficients(double detuning, double mech_freq, double drive_coupling);

struct NonlinearCouplings {
  double g_tilde = 0.0;      // c+^dag c- c- + h.c. amplitude
  double g_a_sum = 0.0;      // off-resonant c+ c- c- combination, diagnostic
  std::array<double, 2> a{};  // linear terms A_s c_s + h.c., diagnostic
};

NonlinearCouplings nonlinear_couplings(const PolaritonBasis& basis, double g);

struct BranchDissipation {
  double kappa = 0.0;
  double kappa_mech = 0.0;
  double kappa_cav = 0.0;
  double occupancy = 0.0;            // n0
  double mech_bath_occupancy = 0.0;  // mechanical bath seen at E_s
  double cavity_occupancy = 0.0;     // n_B[E_s, T_cav]
  Temperature temperature;            // T0
  Temperature cavity_temperature;     // T_cav
};

struct LinearDissipation {
  std::array<BranchDissipation, 2> branch;
  const BranchDissipation& operator[](Branch b) const { return branch[idx(b)]; }
  BranchDissipation& operator[](Branch b) { return branch[idx(b)]; }
};

LinearDissipation linear_dissipation(const SystemParams& p, const PolaritonBasis& basis);

// Lowest-order occupancy of the - polariton near Delta = -2 wM (T_M = 0).
double near_2wm_occupancy(const SystemParams& p);

// Everything derived from one parameter set; the common input of the solvers.
struct Model {
  SystemParams params;
  PolaritonBasis basis;
  NonlinearCouplings couplings;
  LinearDissipation dissipation;
};

Model make_model(const SystemParams& p);

}  // namespace omk
