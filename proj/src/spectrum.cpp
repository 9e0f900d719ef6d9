#include "omk/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "omk/error.hpp"
#include "omk/thermal.hpp"

namespace omk {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpectrumResult cavity_spectrum(const PolaritonBasis& basis, const GreenFunctionSet& G, const FrequencyWindow& out) {
  if (std::abs(out.spacing - G.spacing) > 1e-14 * G.spacing)
    fail(ErrorCode::invalid_argument, "cavity_spectrum: output window is not on the Green function lattice");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SpectrumResult s;
  s.window = out;
  const std::size_t n = out.size;
  s.frequency.resize(n);
  s.emission.resize(n);
  s.density.resize(n);
  s.occupancy.assign(n, nan);
  s.temperature.assign(n, nan);
  s.masked.assign(n, 0);
  s.capped.assign(n, 0);
  double peak_density = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t j = out.index(i);
    double emit = 0.0, rho = 0.0;
    for (Branch b : kBranches) {
      const double a2 = basis[b].alpha_d * basis[b].alpha_d;
      const double ab2 = basis[b].alpha_d_bar * basis[b].alpha_d_bar;
      const double rp = G.retarded_at(b, j).imag(), kp = G.keldysh_at(b, j).imag();
      const double rm = G.retarded_at(b, -j).imag(), km = G.keldysh_at(b, -j).imag();
      // 2 pi n rho = Im G^R - Im G^K / 2 and 2 pi (n + 1) rho = -Im G^R - Im G^K / 2.
      emit += a2 * (rp - 0.5 * kp) + ab2 * (-rm - 0.5 * km);
      rho += (-a2 * rp + ab2 * rm) / kPi;
    }
    s.frequency[i] = out.frequency(i);
    s.emission[i] = emit;
    s.density[i] = rho;
    peak_density = std::max(peak_density, rho);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = s.density[i];
    if (!(rho > 1e-12 * peak_density) || rho <= 0.0) {
      s.masked[i] = 1;
      continue;
    }
    const double occ = s.emission[i] / (2.0 * kPi * rho);
    s.occupancy[i] = occ;
    const double w = s.frequency[i];
    if (w > 0.0 && occ > 0.0) {
      const Temperature t = bose_temperature(w, occ);
      s.temperature[i] = t.value;
      s.capped[i] = t.capped ? 1 : 0;
    }
  }
  return s;
}

SpectrumResult cavity_spectrum(const PolaritonBasis& basis, const GreenFunctionSet& G, double center,
                               double half_width) {
  return cavity_spectrum(basis, G, lattice_window(G.spacing, center - half_width, center + half_width));
}

double integrated_flux(const SpectrumResult& S, double center, double half_width) {
  if (!(half_width > 0.0)) fail(ErrorCode::invalid_argument, "integrated_flux: half width must be positive");
  const double lo = center - half_width, hi = center + half_width;
  const std::size_t n = S.frequency.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "integrated_flux: spectrum has fewer than two points");
  const double h = S.window.spacing;
  const double tol = 1e-9 * h;
  if (lo < S.frequency.front() - tol || hi > S.frequency.back() + tol) {
    std::ostringstream os;
    os << "integrated_flux: band [" << lo << ", " << hi << "] is clipped by the spectrum range ["
       << S.frequency.front() << ", " << S.frequency.back() << "]";
    fail(ErrorCode::invalid_argument, os.str());
  }
  auto value_at = [&](double w) {
    double x = (w - S.frequency.front()) / h;
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= n - 1) i = n - 2;
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * S.emission[i] + t * S.emission[i + 1];
  };
  // Lattice points strictly inside the band, plus interpolated endpoints.
  double acc = 0.0, prev_w = lo, prev_v = value_at(lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = S.frequency[i];
    if (w <= lo + tol || w >= hi - tol) continue;
    acc += 0.5 * (w - prev_w) * (S.emission[i] + prev_v);
    prev_w = w;
    prev_v = S.emission[i];
  }
  acc += 0.5 * (hi - prev_w) * (value_at(hi) + prev_v);
  return acc / (2.0 * kPi);
}

double linear_line_flux(const Model& m, Branch b) {
  const double a = m.basis[b].alpha_d;
  return a * a * m.dissipation[b].occupancy;
}

double linear_band_flux(const Model& m, Branch b, double half_width) {
  const double k = m.dissipation[b].kappa;
  return linear_line_flux(m, b) * 2.0 / kPi * std::atan(half_width / (0.5 * k));
}

double red_sideband_flux(double x, Branch b) {
  const double sign = b == Branch::minus ? -1.0 : 1.0;
  return 0.125 * x * x / (1.0 + sign * 2.0 * x);
}

double TwoPhononPeak::value(double w) const {
  if (height == 0.0) return 0.0;
  const double d = w - center;
  return height * width * width / (d * d + width * width);
}

double TwoPhononPeak::integrated_weight() const { return height * kPi * width; }

TwoPhononPeak two_phonon_peak(const SystemParams& p, bool include_optical_damping) {
  TwoPhononPeak peak;
  const double kappa = p.cavity_damping(), gamma = p.mech_damping();
  const double x2 = std::pow(p.drive_coupling() / p.mech_freq(), 2);
  const double gk2 = std::pow(p.single_photon_coupling() / kappa, 2);
  const double nth = p.mech_bath_occupancy();
  peak.center = polariton_energies(p).plus;
  peak.optical_damping = include_optical_damping ? 8.0 / 9.0 * x2 * kappa : 0.0;
  peak.width = gamma + peak.optical_damping;
  const double r = 1.0 + peak.optical_damping / gamma;
  peak.height = (kappa / gamma) * x2 * gk2 * 16.0 * nth * nth / (r * r * r) / kappa;

  const double wm = p.mech_freq();
  if (std::abs(p.detuning() + 2.0 * wm) > 0.1 * wm) peak.warnings.emplace_back("detuning far from -2 omega_M");
  if (nth < 10.0) peak.warnings.emplace_back("mechanical bath not in the high-temperature regime");
  if (gamma > 0.1 * kappa) peak.warnings.emplace_back("mechanical damping not small compared to kappa");
  if (x2 > 0.01) peak.warnings.emplace_back("G / omega_M not small");
  const Model m = make_model(p);
  const Cooperativities c = cooperativities(m.dissipation, m.couplings.g_tilde);
  if (c.plus > 0.1) peak.warnings.emplace_back("C+ not small; nonlinear broadening ignored");
  return peak;
}

}  // namespace omk
