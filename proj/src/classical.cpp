#include "omk/classical.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "omk/error.hpp"

namespace omk {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

std::complex<double> ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return I;
    case 2: return -1.0;
    default: return -I;
  }
}

double bessel(int n, double x) {
  // J_{-n} = (-1)^n J_n.
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x);
  return (n < 0 && (std::abs(n) % 2 == 1)) ? -v : v;
}

}  // namespace

ClassicalDriveState::ClassicalDriveState(double detuning, double mech_freq, double cavity_damping, double epsilon,
                                         int cutoff)
    : delta_(detuning), wm_(mech_freq), kappa_(cavity_damping), eps_(epsilon), cutoff_(cutoff) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::invalid_argument, "classical_field: epsilon must be >= 0");
  if (cutoff < 4) fail(ErrorCode::invalid_argument, "classical_field: cutoff must be at least 4");
  tail_ = epsilon == 0.0 ? 0.0 : std::abs(bessel(cutoff + 1, epsilon));
  if (tail_ >= 1e-12) {
    std::ostringstream os;
    os << "classical_field: |J_" << cutoff + 1 << "(" << epsilon << ")| = " << tail_ << " exceeds 1e-12";
    fail(ErrorCode::invalid_argument, os.str());
  }
  const int w = 2 * cutoff + 1;
  a_.resize(static_cast<std::size_t>(w * w));
  lines_.assign(static_cast<std::size_t>(2 * w - 1), 0.0);
  for (int n = -cutoff; n <= cutoff; ++n)
    for (int m = -cutoff; m <= cutoff; ++m) {
      const auto v = ipow(n - m) * bessel(n, eps_) * bessel(m, eps_) / (0.5 * kappa_ + I * (n * wm_ - delta_));
      a_[static_cast<std::size_t>((n + cutoff) * w + (m + cutoff))] = v;
      lines_[static_cast<std::size_t>(n + m + 2 * cutoff)] += v;
    }
}

std::complex<double> ClassicalDriveState::coefficient(int n, int m) const {
  if (std::abs(n) > cutoff_ || std::abs(m) > cutoff_) return 0.0;
  const int w = 2 * cutoff_ + 1;
  return a_[static_cast<std::size_t>((n + cutoff_) * w + (m + cutoff_))];
}

std::complex<double> ClassicalDriveState::line(int k) const {
  if (std::abs(k) > 2 * cutoff_) return 0.0;
  return lines_[static_cast<std::size_t>(k + 2 * cutoff_)];
}

std::complex<double> ClassicalDriveState::field(double t) const {
  std::complex<double> acc = 0.0;
  for (int k = -2 * cutoff_; k <= 2 * cutoff_; ++k) acc += line(k) * std::exp(I * (k * wm_ * t));
  return I * acc;
}

ClassicalDriveState classical_field(const SystemParams& p, double epsilon, int cutoff) {
  return ClassicalDriveState(p.detuning(), p.mech_freq(), p.cavity_damping(), epsilon, cutoff);
}

double thermal_epsilon(const SystemParams& p) {
  return 2.0 * std::sqrt(p.mech_bath_occupancy()) * p.single_photon_coupling() / p.mech_freq();
}

OpticalResponse optical_response(const ClassicalDriveState& s, double G) {
  if (!(s.epsilon() > 0.0)) fail(ErrorCode::invalid_argument, "optical_response: needs a nonzero mirror amplitude");
  // First harmonic of |a(t)|^2 against x(t) = x0 sin(wM t), normalized by the static intracavity energy.
  std::complex<double> c1 = 0.0;
  const int c = 2 * s.cutoff();
  for (int k = -c; k < c; ++k) c1 += s.line(k + 1) * std::conj(s.line(k));
  const std::complex<double> k_eff = -4.0 * I * G * G * c1 / (s.epsilon() * std::norm(s.line(0)));
  return {k_eff.imag() / s.mech_freq(), k_eff.real() / (2.0 * s.mech_freq())};
}

ClassicalPeak classical_spectrum(const SystemParams& p) {
  ClassicalPeak pk;
  pk.center = 2.0 * p.mech_freq();
  const double x = p.drive_coupling() / p.mech_freq();
  const double gk = p.single_photon_coupling() / p.cavity_damping();
  const double n = p.mech_bath_occupancy();
  pk.weight = 16.0 * x * x * gk * gk * n * n * std::numbers::pi;
  if (n < 10.0) pk.warnings.emplace_back("classical treatment needs n_th >> 1");
  if (p.cavity_damping() > 0.1 * p.mech_freq()) pk.warnings.emplace_back("not in the good-cavity limit");
  if (std::abs(p.detuning() + 2.0 * p.mech_freq()) > 0.1 * p.mech_freq())
    pk.warnings.emplace_back("detuning far from -2 omega_M");
  return pk;
}

double two_phonon_line_weight(const ClassicalDriveState& s, double G, double g) {
  // Intracavity photon number G^2 / g^2 fixes the drive; the line at
  // omega = +2 wM is the k = -2 harmonic.
  const double ncav = g > 0.0 ? G * G / (g * g) : 0.0;
  return 2.0 * std::numbers::pi * ncav * std::norm(s.line(-2)) / std::norm(s.line(0));
}

double thermal_two_phonon_weight(const SystemParams& p, int nodes, int cutoff) {
  if (nodes < 2) fail(ErrorCode::invalid_argument, "thermal_two_phonon_weight: need at least two nodes");
  // Golub-Welsch for Laguerre weight exp(-u): diagonal 2i+1, off-diagonal i+1.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int i = 0; i < nodes; ++i) {
    j(i, i) = 2.0 * i + 1.0;
    if (i + 1 < nodes) j(i, i + 1) = j(i + 1, i) = i + 1.0;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  const double eps_mean = thermal_epsilon(p);  // amplitude at the mean energy
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double u = es.eigenvalues()[i];
    const double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    const ClassicalDriveState s(p.detuning(), p.mech_freq(), p.cavity_damping(), eps_mean * std::sqrt(u), cutoff);
    acc += w * two_phonon_line_weight(s, p.drive_coupling(), p.single_photon_coupling());
  }
  return acc;
}

}  // namespace omk
