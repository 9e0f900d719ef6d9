#pragma once

#include <complex>
#include <string>
#include <vector>

#include "omk/model.hpp"

namespace omk {

// Bessel-series steady state of the cavity driven while the mirror moves as
// x0 sin(wM t). Amplitudes are relative to the input amplitude; line k
// oscillates as exp(i k wM t) in the frame of the drive.
class ClassicalDriveState {
 public:
  ClassicalDriveState(double detuning, double mech_freq, double cavity_damping, double epsilon, int cutoff);

  double epsilon() const { return eps_; }
  int cutoff() const { return cutoff_; }
  bool strong_modulation() const { return eps_ > 0.3; }
  double tail_bound() const { return tail_; }  // |J_n(eps)| just beyond the cutoff

  std::complex<double> coefficient(int n, int m) const;
  std::complex<double> line(int k) const;  // sum of a_{n,m} with n + m = k
  std::complex<double> field(double t) const;
  double mech_freq() const { return wm_; }

 private:
  double delta_, wm_, kappa_, eps_;
  int cutoff_;
  double tail_;
  std::vector<std::complex<double>> a_;  // (2c+1)^2, row n, column m
  std::vector<std::complex<double>> lines_;
};

ClassicalDriveState classical_field(const SystemParams& p, double epsilon, int cutoff = 12);

// Mirror amplitude parameter for a thermal mean energy wM * n_th.
double thermal_epsilon(const SystemParams& p);

struct OpticalResponse {
  double damping = 0.0;       // Gamma_opt
  double spring_shift = 0.0;  // delta Omega
};

// First-harmonic radiation-pressure force on the mirror, for small epsilon.
OpticalResponse optical_response(const ClassicalDriveState& s, double drive_coupling);

struct ClassicalPeak {
  double center = 0.0;
  double weight = 0.0;
  std::vector<std::string> warnings;
};

// Delta-peak weight 16 (G/wM)^2 (g/kappa)^2 n_th^2 pi at omega = 2 wM.
ClassicalPeak classical_spectrum(const SystemParams& p);

// Weight of the omega = 2 wM line from the Bessel series at fixed epsilon.
double two_phonon_line_weight(const ClassicalDriveState& s, double drive_coupling, double g);

// The same line averaged over a thermal (Rayleigh) mirror amplitude with mean
// energy wM n_th, by Gauss-Laguerre quadrature.
double thermal_two_phonon_weight(const SystemParams& p, int nodes = 24, int cutoff = 12);

}  // namespace omk
