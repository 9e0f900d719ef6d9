#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "omk/grid.hpp"
#include "omk/model.hpp"

namespace omk {

using cplx = std::complex<double>;

// Bare Lorentzian line of one polariton: energy, linewidth, bath occupancy.
struct PolaritonLine {
  double energy = 0.0;
  double width = 0.0;
  double occupancy = 0.0;
};

using LinePair = std::array<PolaritonLine, 2>;
LinePair bare_lines(const Model& m);

struct Cooperativities {
  double minus = 0.0;
  double plus = 0.0;
};

Cooperativities cooperativities(const LinearDissipation& d, double g_tilde);
Cooperativities cooperativities(const LinePair& lines, double g_tilde);

// Frequency-independent interaction-bath occupancies at leading order.
// minus diverges when n0- = n0+; it is then reported as +inf with the flag set.
struct InteractionOccupancies {
  double minus = 0.0;
  double plus = 0.0;
  bool minus_divergent = false;
};

InteractionOccupancies interaction_occupancies(const LinePair& lines);

// Leading-order n_eff at the polariton energy: the damping-weighted average of
// the intrinsic and interaction baths. Infinite once the total damping is <= 0.
double leading_peak_occupancy(const LinePair& lines, double g_tilde, Branch b);

// Closed-form second-order self-energies for bare Lorentzian inputs.
// Defined at every frequency; used on windows and as the off-window continuation.
struct ResonantInteraction {
  LinePair lines{};
  double g_tilde = 0.0;

  cplx retarded(Branch b, double w) const;
  cplx keldysh(Branch b, double w) const;
};

struct WindowOptions {
  double half_width_factor = 40.0;  // W = factor * (kappa- + kappa+)
  double resolution = 20.0;         // spacing <= narrowest width / resolution
  std::size_t min_points = 4096;
  std::size_t max_points = std::size_t{1} << 17;
};

struct WindowPlan {
  double spacing = 0.0;
  std::size_t points = 0;
  double narrowest_width = 0.0;
  std::array<FrequencyWindow, 2> windows{};
  const FrequencyWindow& operator[](Branch b) const { return windows[idx(b)]; }
};

// Two windows of equal power-of-two size on a lattice containing E- exactly;
// the + window is centred on the lattice point nearest E+.
WindowPlan plan_windows(const Model& m, const WindowOptions& opt = {});

struct BranchGreen {
  FrequencyWindow window;
  std::vector<cplx> retarded;
  std::vector<cplx> keldysh;
  std::vector<cplx> advanced() const;
};

// Green functions of both polaritons. Standard convention:
// G^K = 2i (2n+1) Im G^R, so Im G^K <= 2 Im G^R <= 0.
struct GreenFunctionSet {
  double spacing = 0.0;
  ResonantInteraction tail;  // analytic continuation off the windows
  std::array<BranchGreen, 2> branch;
  bool unresolved = false;   // Dyson denominator narrower than 10 grid spacings

  const BranchGreen& operator[](Branch b) const { return branch[idx(b)]; }
  BranchGreen& operator[](Branch b) { return branch[idx(b)]; }

  // Values at any lattice index: stored inside the window, analytic outside.
  cplx retarded_at(Branch b, std::int64_t j) const;
  cplx keldysh_at(Branch b, std::int64_t j) const;
};

struct BranchSelfEnergy {
  FrequencyWindow window;
  std::vector<cplx> retarded;
  std::vector<cplx> keldysh;

  std::vector<double> interaction_damping() const;  // -2 Im Sigma^R
  // (Sigma^K / (2i Im Sigma^R) - 1) / 2; NaN where Im Sigma^R vanishes.
  std::vector<double> interaction_occupancy() const;
};

struct SelfEnergySet {
  double g_tilde = 0.0;
  std::array<BranchSelfEnergy, 2> branch;
  const BranchSelfEnergy& operator[](Branch b) const { return branch[idx(b)]; }
  BranchSelfEnergy& operator[](Branch b) { return branch[idx(b)]; }
};

GreenFunctionSet bare_green(const LinePair& lines, const WindowPlan& plan);
GreenFunctionSet bare_green(const Model& m, const WindowPlan& plan);

SelfEnergySet leading_self_energy(const LinePair& lines, double g_tilde, const WindowPlan& plan);
SelfEnergySet leading_self_energy(const Model& m, const WindowPlan& plan);

// Second-order bubble with dressed propagators, by FFT convolution on the lattice.
SelfEnergySet bubble_self_energy(const GreenFunctionSet& G, double g_tilde);

GreenFunctionSet dyson_solve(const GreenFunctionSet& bare, const SelfEnergySet& sigma);

struct SolverOptions {
  int max_iterations = 20;
  double mixing = 1.0;
  double tolerance = 1e-8;
};

struct ConvergenceReport {
  std::vector<double> deltas;  // relative sup-norm change per iteration
  int iterations = 0;
  bool converged = false;
  bool unresolved = false;
  std::string message;
};

struct SelfConsistentResult {
  GreenFunctionSet green;
  SelfEnergySet self_energy;
  ConvergenceReport report;
};

SelfConsistentResult self_consistent_solve(const LinePair& lines, double g_tilde, const WindowPlan& plan,
                                           const SolverOptions& opt = {});
SelfConsistentResult self_consistent_solve(const Model& m, const WindowPlan& plan, const SolverOptions& opt = {});

std::array<std::vector<double>, 2> polariton_dos(const GreenFunctionSet& G);

struct Distribution {
  std::vector<double> occupancy;   // NaN at masked points
  std::vector<std::uint8_t> mask;  // 1 where Im G^R is too small to divide by
};

std::array<Distribution, 2> distribution_function(const GreenFunctionSet& G, double mask_threshold = 1e-12);

// n_eff at one lattice index, stored or analytic.
double distribution_at(const GreenFunctionSet& G, Branch b, std::int64_t j);

// Total polariton number: integral of n_eff rho over the window plus the bare tail.
double polariton_occupancy(const GreenFunctionSet& G, Branch b);

// Interaction damping at the resonant frequency divided by the bare width.
Cooperativities effective_cooperativities(const SelfEnergySet& sigma, const GreenFunctionSet& bare);

struct InstabilityReport {
  double c_minus = 0.0;
  bool negative_damping = false;  // C- < 0
  bool near_threshold = false;    // -1 < C- <= -0.9
  bool unstable = false;          // C- <= -1
  double threshold_occupancy = 0.0;        // kappa-^2 / (16 g~^2)
  double leading_minus_occupancy = 0.0;    // closed form from the + occupancy
  double paramp_minus_occupancy = 0.0;     // coherently pumped amplifier value
};

InstabilityReport instability_report(const LinePair& lines, double g_tilde);
InstabilityReport instability_report(const Model& m);

}  // namespace omk
