#include "omk/model.hpp"

#include <cmath>
#include <sstream>

#include "omk/error.hpp"

namespace omk {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::domain: return "domain";
    case ErrorCode::window_mismatch: return "window_mismatch";
    case ErrorCode::pole_on_grid: return "pole_on_grid";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::memory_budget: return "memory_budget";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

const char* branch_name(Branch b) { return b == Branch::minus ? "minus" : "plus"; }

namespace {

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::domain, what);
}

}  // namespace

SystemParams::SystemParams(const ParamValues& v) : v_(v) {
  const double all[] = {v.detuning, v.mech_freq, v.drive_coupling, v.single_photon_coupling,
                        v.cavity_damping, v.mech_damping, v.mech_bath_occupancy};
  for (double x : all) require(std::isfinite(x), "SystemParams: non-finite value");
  require(v.detuning < 0.0, "SystemParams: detuning must be negative (red-detuned drive)");
  require(v.mech_freq > 0.0, "SystemParams: mechanical frequency must be positive");
  require(v.cavity_damping > 0.0, "SystemParams: cavity damping must be positive");
  require(v.mech_damping > 0.0, "SystemParams: mechanical damping must be positive");
  require(v.drive_coupling >= 0.0, "SystemParams: drive coupling must be nonnegative");
  require(v.single_photon_coupling >= 0.0, "SystemParams: single-photon coupling must be nonnegative");
  require(v.mech_bath_occupancy >= 0.0, "SystemParams: bath occupancy must be nonnegative");
  if (v.drive_coupling >= omk::critical_coupling(v.detuning, v.mech_freq)) {
    std::ostringstream os;
    os << "SystemParams: G = " << v.drive_coupling << " is at or beyond the instability G_crit = "
       << omk::critical_coupling(v.detuning, v.mech_freq);
    fail(ErrorCode::domain, os.str());
  }
}

double SystemParams::critical_coupling() const { return omk::critical_coupling(v_.detuning, v_.mech_freq); }

double SystemParams::mech_temperature() const {
  return bose_temperature(v_.mech_freq, v_.mech_bath_occupancy).value;
}

double critical_coupling(double detuning, double mech_freq) {
  require(detuning < 0.0 && mech_freq > 0.0, "critical_coupling: need detuning < 0 < mech_freq");
  return std::sqrt(-mech_freq * detuning / 4.0);
}

double resonant_coupling(double detuning, double mech_freq) {
  require(mech_freq > 0.0, "resonant_coupling: mech_freq must be positive");
  const double lo = -2.0 * mech_freq, hi = -0.5 * mech_freq;
  const double tol = 1e-12 * mech_freq;
  if (detuning < lo - tol || detuning > hi + tol) {
    std::ostringstream os;
    os << "resonant_coupling: detuning " << detuning << " outside [" << lo << ", " << hi << "]";
    fail(ErrorCode::domain, os.str());
  }
  const double d2 = detuning * detuning, w2 = mech_freq * mech_freq;
  double radicand = 17.0 * d2 * w2 - 4.0 * (d2 * d2 + w2 * w2);
  // Rounding can push the radicand slightly negative at the interval ends.
  if (radicand < 0.0) radicand = 0.0;
  return std::sqrt(radicand) / (10.0 * std::sqrt(-detuning * mech_freq));
}

namespace {

// Real-symmetric form of the quadratic problem. With x = (X_d, X_b) scaled
// quadratures the normal-mode frequencies squared are the eigenvalues of
// K = [[wc^2, 2G sqrt(wc wM)], [2G sqrt(wc wM), wM^2]].
struct Reduced {
  double wc, wm, a, b, c;
  double ep2, em2, theta;
};

Reduced reduce(double detuning, double mech_freq, double G) {
  require(detuning < 0.0 && mech_freq > 0.0 && G >= 0.0 && std::isfinite(G),
          "polariton_energies: need detuning < 0 < mech_freq and G >= 0");
  Reduced r{};
  r.wc = -detuning;
  r.wm = mech_freq;
  r.a = r.wc * r.wc;
  r.b = r.wm * r.wm;
  r.c = 2.0 * G * std::sqrt(r.wc * r.wm);
  r.ep2 = 0.5 * (r.a + r.b) + std::hypot(0.5 * (r.a - r.b), r.c);
  // det K / E+^2 avoids cancellation as G approaches G_crit.
  const double det = r.wc * r.wm * (r.wc * r.wm - 4.0 * G * G);
  if (!(det > 0.0)) {
    std::ostringstream os;
    os << "polariton_energies: G = " << G << " at or beyond instability (E-^2 <= 0)";
    fail(ErrorCode::domain, os.str());
  }
  r.em2 = det / r.ep2;
  r.theta = 0.5 * std::atan2(2.0 * r.c, r.a - r.b);
  return r;
}

}  // namespace

PolaritonEnergies polariton_energies(double detuning, double mech_freq, double drive_coupling) {
  const Reduced r = reduce(detuning, mech_freq, drive_coupling);
  return {std::sqrt(r.em2), std::sqrt(r.ep2)};
}

PolaritonEnergies polariton_energies(const SystemParams& p) {
  return polariton_energies(p.detuning(), p.mech_freq(), p.drive_coupling());
}

PolaritonBasis bogoliubov_coefficients(double detuning, double mech_freq, double drive_coupling) {
  const Reduced r = reduce(detuning, mech_freq, drive_coupling);
  const double ct = std::cos(r.theta), st = std::sin(r.theta);
  PolaritonBasis basis;
  auto fill = [&](Polariton& m, double e2, double od, double ob) {
    // Sign fixed so that the photon overlap is nonnegative.
    if (od < 0.0 || (od == 0.0 && ob < 0.0)) {
      od = -od;
      ob = -ob;
    }
    const double E = std::sqrt(e2);
    m.energy = E;
    const double nd = 2.0 * std::sqrt(r.wc * E), nb = 2.0 * std::sqrt(r.wm * E);
    m.alpha_d = od * (r.wc + E) / nd;
    m.alpha_d_bar = od * (r.wc - E) / nd;
    m.alpha_b = ob * (r.wm + E) / nb;
    m.alpha_b_bar = ob * (r.wm - E) / nb;
  };
  fill(basis[Branch::plus], r.ep2, ct, st);
  fill(basis[Branch::minus], r.em2, -st, ct);
  return basis;
}

PolaritonBasis bogoliubov_coefficients(const SystemParams& p) {
  return bogoliubov_coefficients(p.detuning(), p.mech_freq(), p.drive_coupling());
}

NonlinearCouplings nonlinear_couplings(const PolaritonBasis& basis, double g) {
  const Polariton& m = basis[Branch::minus];
  const Polariton& p = basis[Branch::plus];
  const double bm = m.mech_overlap(), bp = p.mech_overlap();
  NonlinearCouplings out;
  out.g_tilde = g * (bp * m.alpha_d * m.alpha_d_bar + bm * (m.alpha_d * p.alpha_d + m.alpha_d_bar * p.alpha_d_bar));
  out.g_a_sum = g * (p.alpha_d * p.alpha_d_bar * bm + (m.alpha_d_bar * p.alpha_d + p.alpha_d_bar * m.alpha_d) * bp);
  const double sum_bar2 = m.alpha_d_bar * m.alpha_d_bar + p.alpha_d_bar * p.alpha_d_bar;
  for (Branch s : kBranches) {
    const Polariton& ms = basis[s];
    double acc = 0.0;
    for (Branch t : kBranches) {
      const Polariton& mt = basis[t];
      acc += mt.mech_overlap() * (mt.alpha_d_bar * ms.alpha_d + ms.alpha_d_bar * mt.alpha_d);
    }
    out.a[idx(s)] = g * (acc + sum_bar2 * ms.mech_overlap());
  }
  return out;
}

LinearDissipation linear_dissipation(const SystemParams& p, const PolaritonBasis& basis) {
  LinearDissipation out;
  const double tm = p.bath() == MechanicalBath::bose ? p.mech_temperature() : 0.0;
  for (Branch s : kBranches) {
    const Polariton& m = basis[s];
    BranchDissipation& d = out[s];
    const double beta = m.mech_overlap();
    d.kappa_mech = p.mech_damping() * beta * beta;
    const double norm_d = m.alpha_d * m.alpha_d - m.alpha_d_bar * m.alpha_d_bar;
    d.kappa_cav = p.cavity_damping() * norm_d;
    d.kappa = d.kappa_mech + d.kappa_cav;
    if (!(d.kappa > 0.0)) fail(ErrorCode::domain, "linear_dissipation: nonpositive polariton damping");
    d.mech_bath_occupancy =
        p.bath() == MechanicalBath::flat ? p.mech_bath_occupancy() : bose_occupancy(m.energy, tm);
    const double bar2 = m.alpha_d_bar * m.alpha_d_bar;
    d.occupancy = (d.kappa_mech * d.mech_bath_occupancy + p.cavity_damping() * bar2) / d.kappa;
    d.cavity_occupancy = norm_d > 0.0 ? bar2 / norm_d : 0.0;
    d.temperature = bose_temperature(m.energy, d.occupancy);
    d.cavity_temperature = bose_temperature(m.energy, d.cavity_occupancy);
  }
  return out;
}

double near_2wm_occupancy(const SystemParams& p) {
  const double x = std::pow(p.drive_coupling() / p.mech_freq(), 2);
  const double k = p.cavity_damping();
  return (x * k / 9.0) / (p.mech_damping() + 8.0 / 9.0 * x * k);
}

Model make_model(const SystemParams& p) {
  Model m{p, bogoliubov_coefficients(p), {}, {}};
  m.couplings = nonlinear_couplings(m.basis, p.single_photon_coupling());
  m.dissipation = linear_dissipation(p, m.basis);
  return m;
}

}  // namespace omk
