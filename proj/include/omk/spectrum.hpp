#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omk/grid.hpp"
#include "omk/keldysh.hpp"
#include "omk/model.hpp"

namespace omk {

// Photon-frame observables in the frame rotating at the drive (omega = 0 at the laser).
struct SpectrumResult {
  FrequencyWindow window;
  std::vector<double> frequency;
  std::vector<double> emission;       // S_d
  std::vector<double> density;        // rho_d
  std::vector<double> occupancy;      // n_eff_d, NaN where masked
  std::vector<double> temperature;    // T_eff_d, NaN where undefined
  std::vector<std::uint8_t> masked;   // rho_d too small to define n_eff_d
  std::vector<std::uint8_t> capped;   // occupancy above the cap; temperature is the cap value
};

// Spectrum on lattice points of G. Off-window values (including the -omega
// anomalous terms) come from the analytic continuation carried by G.
SpectrumResult cavity_spectrum(const PolaritonBasis& basis, const GreenFunctionSet& G, const FrequencyWindow& out);

// Band around center on G's lattice.
SpectrumResult cavity_spectrum(const PolaritonBasis& basis, const GreenFunctionSet& G, double center,
                               double half_width);

inline constexpr double kDefaultBandHalfWidth = 5.0;

// Trapezoid integral of S_d / 2 pi over [center - half_width, center + half_width].
double integrated_flux(const SpectrumResult& S, double center, double half_width = kDefaultBandHalfWidth);

// Linearized flux of one polariton resonance when the whole line is collected.
double linear_line_flux(const Model& m, Branch b);

// The same line restricted to a band of the given half-width around E_s.
double linear_band_flux(const Model& m, Branch b, double half_width = kDefaultBandHalfWidth);

// Closed-form flux at Delta = -wM for T_M = 0 and gamma << kappa.
double red_sideband_flux(double drive_over_mech, Branch b);

// Lorentzian two-phonon peak near E+ for Delta close to -2 wM.
struct TwoPhononPeak {
  double center = 0.0;
  double width = 0.0;            // half width at half maximum, gamma + optical damping
  double optical_damping = 0.0;
  double height = 0.0;
  std::vector<std::string> warnings;

  double value(double w) const;
  double integrated_weight() const;  // integral of S_d over the line
};

TwoPhononPeak two_phonon_peak(const SystemParams& p, bool include_optical_damping = true);

}  // namespace omk
