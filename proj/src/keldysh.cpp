#include "omk/keldysh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft_convolve.hpp"
#include "omk/error.hpp"

namespace omk {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sq(double x) { return x * x; }

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Dyson-dressed values from a line and its self-energy at one frequency.
struct Dressed {
  cplx retarded, keldysh;
  double denominator;
};

Dressed dress(const PolaritonLine& l, double w, cplx sr, cplx sk) {
  const cplx den = w - l.energy + 0.5 * I * l.width - sr;
  const cplx r = 1.0 / den;
  const cplx k = std::norm(r) * (sk - I * l.width * (2.0 * l.occupancy + 1.0));
  return {r, k, std::abs(den)};
}

}  // namespace

LinePair bare_lines(const Model& m) {
  LinePair out;
  for (Branch b : kBranches)
    out[idx(b)] = {m.basis[b].energy, m.dissipation[b].kappa, m.dissipation[b].occupancy};
  return out;
}

Cooperativities cooperativities(const LinePair& l, double g) {
  const double km = l[0].width, kp = l[1].width, nm = l[0].occupancy, np = l[1].occupancy;
  return {16.0 * g * g * (nm - np) / (km * (km + kp)), 4.0 * g * g * (2.0 * nm + 1.0) / (km * kp)};
}

Cooperativities cooperativities(const LinearDissipation& d, double g) {
  LinePair l;
  for (Branch b : kBranches) l[idx(b)] = {0.0, d[b].kappa, d[b].occupancy};
  return cooperativities(l, g);
}

InteractionOccupancies interaction_occupancies(const LinePair& l) {
  const double nm = l[0].occupancy, np = l[1].occupancy;
  InteractionOccupancies out;
  out.plus = nm * nm / (2.0 * nm + 1.0);
  if (nm == np) {
    out.minus = std::numeric_limits<double>::infinity();
    out.minus_divergent = true;
  } else {
    out.minus = np * (nm + 1.0) / (nm - np);
  }
  return out;
}

double leading_peak_occupancy(const LinePair& l, double g, Branch b) {
  const double km = l[0].width, kp = l[1].width, nm = l[0].occupancy, np = l[1].occupancy;
  const Cooperativities c = cooperativities(l, g);
  // C * n_int in product form, finite where n_int itself diverges.
  double weighted = 0.0, coop = 0.0, n0 = 0.0;
  if (b == Branch::minus) {
    weighted = 16.0 * g * g * np * (nm + 1.0) / (km * (km + kp));
    coop = c.minus;
    n0 = nm;
  } else {
    weighted = 4.0 * g * g * nm * nm / (km * kp);
    coop = c.plus;
    n0 = np;
  }
  if (1.0 + coop <= 0.0) return std::numeric_limits<double>::infinity();
  return (weighted + n0) / (1.0 + coop);
}

cplx ResonantInteraction::retarded(Branch b, double w) const {
  const PolaritonLine &m = lines[0], &p = lines[1];
  const double g2 = g_tilde * g_tilde;
  if (b == Branch::plus)
    return 2.0 * g2 * (2.0 * m.occupancy + 1.0) / (w - 2.0 * m.energy + I * m.width);
  const double kbar = 0.5 * (m.width + p.width);
  return 4.0 * g2 * (m.occupancy - p.occupancy) / (w - (p.energy - m.energy) + I * kbar);
}

cplx ResonantInteraction::keldysh(Branch b, double w) const {
  const PolaritonLine &m = lines[0], &p = lines[1];
  const double g2 = g_tilde * g_tilde;
  if (b == Branch::plus) {
    const double lor = std::imag(1.0 / (w - 2.0 * m.energy + I * m.width));
    return 4.0 * I * g2 * (2.0 * sq(m.occupancy) + 2.0 * m.occupancy + 1.0) * lor;
  }
  const double kbar = 0.5 * (m.width + p.width);
  const double lor = std::imag(1.0 / (w - (p.energy - m.energy) + I * kbar));
  // Finite product form; regular where the interaction occupancy diverges.
  return 4.0 * I * g2 * ((2.0 * p.occupancy + 1.0) * (2.0 * m.occupancy + 1.0) - 1.0) * lor;
}

std::vector<cplx> BranchGreen::advanced() const {
  std::vector<cplx> a(retarded.size());
  std::transform(retarded.begin(), retarded.end(), a.begin(), [](cplx z) { return std::conj(z); });
  return a;
}

cplx GreenFunctionSet::retarded_at(Branch b, std::int64_t j) const {
  const BranchGreen& g = branch[idx(b)];
  if (g.window.contains(j)) return g.retarded[g.window.offset(j)];
  const double w = static_cast<double>(j) * spacing;
  return dress(tail.lines[idx(b)], w, tail.retarded(b, w), tail.keldysh(b, w)).retarded;
}

cplx GreenFunctionSet::keldysh_at(Branch b, std::int64_t j) const {
  const BranchGreen& g = branch[idx(b)];
  if (g.window.contains(j)) return g.keldysh[g.window.offset(j)];
  const double w = static_cast<double>(j) * spacing;
  return dress(tail.lines[idx(b)], w, tail.retarded(b, w), tail.keldysh(b, w)).keldysh;
}

std::vector<double> BranchSelfEnergy::interaction_damping() const {
  std::vector<double> out(retarded.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -2.0 * retarded[i].imag();
  return out;
}

std::vector<double> BranchSelfEnergy::interaction_occupancy() const {
  std::vector<double> out(retarded.size(), std::numeric_limits<double>::quiet_NaN());
  double scale = 0.0;
  for (const cplx& z : retarded) scale = std::max(scale, std::abs(z.imag()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double im = retarded[i].imag();
    if (std::abs(im) > 1e-300 && std::abs(im) > 1e-14 * scale)
      out[i] = 0.5 * (keldysh[i].imag() / (2.0 * im) - 1.0);
  }
  return out;
}

GreenFunctionSet bare_green(const LinePair& lines, const WindowPlan& plan) {
  GreenFunctionSet G;
  G.spacing = plan.spacing;
  G.tail = {lines, 0.0};
  for (Branch b : kBranches) {
    BranchGreen& g = G[b];
    g.window = plan[b];
    g.retarded.resize(g.window.size);
    g.keldysh.resize(g.window.size);
    const PolaritonLine& l = lines[idx(b)];
    for (std::size_t i = 0; i < g.window.size; ++i) {
      const cplx r = 1.0 / (g.window.frequency(i) - l.energy + 0.5 * I * l.width);
      g.retarded[i] = r;
      g.keldysh[i] = 2.0 * I * (2.0 * l.occupancy + 1.0) * r.imag();
    }
  }
  return G;
}

GreenFunctionSet bare_green(const Model& m, const WindowPlan& plan) { return bare_green(bare_lines(m), plan); }

SelfEnergySet leading_self_energy(const LinePair& lines, double g_tilde, const WindowPlan& plan) {
  const ResonantInteraction ri{lines, g_tilde};
  SelfEnergySet S;
  S.g_tilde = g_tilde;
  for (Branch b : kBranches) {
    BranchSelfEnergy& s = S[b];
    s.window = plan[b];
    s.retarded.resize(s.window.size);
    s.keldysh.resize(s.window.size);
    for (std::size_t i = 0; i < s.window.size; ++i) {
      const double w = s.window.frequency(i);
      s.retarded[i] = ri.retarded(b, w);
      s.keldysh[i] = ri.keldysh(b, w);
    }
  }
  return S;
}

SelfEnergySet leading_self_energy(const Model& m, const WindowPlan& plan) {
  return leading_self_energy(bare_lines(m), m.couplings.g_tilde, plan);
}

namespace {

// Window values extended to twice the width with the analytic continuation.
struct Extended {
  std::int64_t first;
  detail::cvec r, k;
};

Extended extend(const GreenFunctionSet& G, Branch b) {
  const FrequencyWindow& w = G[b].window;
  Extended e;
  const auto pad = static_cast<std::int64_t>(w.size / 2);
  e.first = w.first - pad;
  const std::size_t n = 2 * w.size;
  e.r.resize(n);
  e.k.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t j = e.first + static_cast<std::int64_t>(i);
    e.r[i] = G.retarded_at(b, j);
    e.k[i] = G.keldysh_at(b, j);
  }
  return e;
}

void check_image(const FrequencyWindow& target, std::int64_t image, const char* what) {
  if (!target.contains(image)) {
    std::ostringstream os;
    os << "bubble_self_energy: " << what << " image at lattice index " << image << " lies outside the target window ["
       << target.first << ", " << target.last() << "]";
    fail(ErrorCode::window_mismatch, os.str());
  }
}

}  // namespace

SelfEnergySet bubble_self_energy(const GreenFunctionSet& G, double g_tilde) {
  const double h = G.spacing;
  const FrequencyWindow& wm = G[Branch::minus].window;
  const FrequencyWindow& wp = G[Branch::plus].window;
  const PolaritonLine& lm = G.tail.lines[0];
  const PolaritonLine& lp = G.tail.lines[1];
  const std::int64_t cm = std::llround(lm.energy / h), cp = std::llround(lp.energy / h);
  check_image(wp, 2 * cm, "2E-");
  check_image(wm, cp - cm, "E+ - E-");

  SelfEnergySet S;
  S.g_tilde = g_tilde;
  S[Branch::minus].window = wm;
  S[Branch::plus].window = wp;
  for (auto& s : S.branch) {
    s.retarded.assign(s.window.size, cplx{});
    s.keldysh.assign(s.window.size, cplx{});
  }
  if (g_tilde == 0.0) return S;

  const Extended em = extend(G, Branch::minus);
  const Extended ep = extend(G, Branch::plus);
  const std::size_t lm_len = em.r.size(), lp_len = ep.r.size();
  const std::size_t m = detail::next_pow2(lm_len + std::max(lm_len, lp_len) - 1);

  auto spectral = [](const detail::cvec& r) {
    detail::cvec d(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) d[i] = 2.0 * I * r[i].imag();
    return d;
  };
  auto conjugate = [](const detail::cvec& r) {
    detail::cvec a(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) a[i] = std::conj(r[i]);
    return a;
  };
  const detail::cvec dm = spectral(em.r), dp = spectral(ep.r);

  const double pref = g_tilde * g_tilde * h / kTwoPi;
  const double inv_m = 1.0 / static_cast<double>(m);

  // Sigma+ [w] = 2i g^2 int K-[v] R-[w-v];  Sigma+^K = i g^2 int (K-K- + D-D-).
  {
    const detail::cvec fk = detail::padded_spectrum(em.k, m);
    const detail::cvec fr = detail::padded_spectrum(em.r, m);
    const detail::cvec fd = detail::padded_spectrum(dm, m);
    detail::cvec r(m), k(m);
    for (std::size_t i = 0; i < m; ++i) {
      r[i] = fk[i] * fr[i];
      k[i] = fk[i] * fk[i] + fd[i] * fd[i];
    }
    detail::fft_inverse(r);
    detail::fft_inverse(k);
    BranchSelfEnergy& s = S[Branch::plus];
    const std::int64_t base = 2 * em.first;
    for (std::size_t i = 0; i < s.window.size; ++i) {
      const auto t = static_cast<std::size_t>(s.window.index(i) - base);
      s.retarded[i] = 2.0 * I * pref * r[t] * inv_m;
      s.keldysh[i] = cplx(0.0, (I * pref * k[t] * inv_m).imag());
    }
  }
  // Sigma- [w] = 2i g^2 int {R+[v] K-[v-w] + K+[v] A-[v-w]};
  // Sigma-^K = 2i g^2 int {K+[v] K-[v-w] - D+[v] D-[v-w]}.
  {
    const detail::cvec frp = detail::padded_spectrum(ep.r, m);
    const detail::cvec fkp = detail::padded_spectrum(ep.k, m);
    const detail::cvec fdp = detail::padded_spectrum(dp, m);
    const detail::cvec fkm = detail::padded_spectrum(em.k, m, true);
    const detail::cvec fam = detail::padded_spectrum(conjugate(em.r), m, true);
    const detail::cvec fdm = detail::padded_spectrum(dm, m, true);
    detail::cvec r(m), k(m);
    for (std::size_t i = 0; i < m; ++i) {
      r[i] = frp[i] * fkm[i] + fkp[i] * fam[i];
      k[i] = fkp[i] * fkm[i] - fdp[i] * fdm[i];
    }
    detail::fft_inverse(r);
    detail::fft_inverse(k);
    BranchSelfEnergy& s = S[Branch::minus];
    const std::int64_t w0 = ep.first - em.first - static_cast<std::int64_t>(lm_len - 1);
    for (std::size_t i = 0; i < s.window.size; ++i) {
      const auto t = static_cast<std::size_t>(s.window.index(i) - w0);
      s.retarded[i] = 2.0 * I * pref * r[t] * inv_m;
      s.keldysh[i] = cplx(0.0, (2.0 * I * pref * k[t] * inv_m).imag());
    }
  }
  return S;
}

GreenFunctionSet dyson_solve(const GreenFunctionSet& bare, const SelfEnergySet& sigma) {
  GreenFunctionSet out;
  out.spacing = bare.spacing;
  out.tail = {bare.tail.lines, sigma.g_tilde};
  double min_den = std::numeric_limits<double>::infinity();
  for (Branch b : kBranches) {
    const BranchGreen& g0 = bare[b];
    const BranchSelfEnergy& s = sigma[b];
    if (s.window.first != g0.window.first || s.window.size != g0.window.size)
      fail(ErrorCode::window_mismatch, "dyson_solve: self-energy and Green function windows differ");
    BranchGreen& g = out[b];
    g.window = g0.window;
    g.retarded.resize(g.window.size);
    g.keldysh.resize(g.window.size);
    const PolaritonLine& l = bare.tail.lines[idx(b)];
    for (std::size_t i = 0; i < g.window.size; ++i) {
      const Dressed d = dress(l, g.window.frequency(i), s.retarded[i], s.keldysh[i]);
      if (!(d.denominator >= 1e-12)) {
        std::ostringstream os;
        os << "dyson_solve: vanishing denominator for the " << branch_name(b) << " polariton at omega = "
           << g.window.frequency(i);
        fail(ErrorCode::pole_on_grid, os.str());
      }
      min_den = std::min(min_den, d.denominator);
      g.retarded[i] = d.retarded;
      g.keldysh[i] = d.keldysh;
    }
  }
  out.unresolved = min_den < 10.0 * bare.spacing;
  return out;
}

SelfConsistentResult self_consistent_solve(const LinePair& lines, double g_tilde, const WindowPlan& plan,
                                           const SolverOptions& opt) {
  if (opt.max_iterations < 1) fail(ErrorCode::invalid_argument, "self_consistent_solve: need at least one iteration");
  if (!(opt.mixing > 0.0 && opt.mixing <= 1.0))
    fail(ErrorCode::invalid_argument, "self_consistent_solve: mixing must lie in (0, 1]");
  const GreenFunctionSet bare = bare_green(lines, plan);
  SelfConsistentResult res{bare, {}, {}};
  for (int it = 1; it <= opt.max_iterations; ++it) {
    SelfEnergySet sigma = bubble_self_energy(res.green, g_tilde);
    GreenFunctionSet next = dyson_solve(bare, sigma);
    double delta = 0.0;
    for (Branch b : kBranches) {
      BranchGreen& n = next[b];
      const BranchGreen& o = res.green[b];
      if (opt.mixing < 1.0) {
        for (std::size_t i = 0; i < n.retarded.size(); ++i) {
          n.retarded[i] = opt.mixing * n.retarded[i] + (1.0 - opt.mixing) * o.retarded[i];
          n.keldysh[i] = opt.mixing * n.keldysh[i] + (1.0 - opt.mixing) * o.keldysh[i];
        }
      }
      const double dr = max_abs_diff(n.retarded, o.retarded) / max_abs(n.retarded);
      const double dk = max_abs_diff(n.keldysh, o.keldysh) / std::max(max_abs(n.keldysh), 1e-300);
      delta = std::max({delta, dr, dk});
    }
    if (!std::isfinite(delta)) {
      std::ostringstream os;
      os << "self_consistent_solve: non-finite Green function at iteration " << it;
      fail(ErrorCode::numeric, os.str());
    }
    res.green = std::move(next);
    res.self_energy = std::move(sigma);
    res.report.deltas.push_back(delta);
    res.report.iterations = it;
    if (delta < opt.tolerance) {
      res.report.converged = true;
      break;
    }
  }
  res.report.unresolved = res.green.unresolved;
  std::ostringstream os;
  os << (res.report.converged ? "converged" : "not converged") << " after " << res.report.iterations
     << " iterations, last delta " << res.report.deltas.back();
  if (res.report.unresolved) os << "; dressed line narrower than 10 grid spacings";
  res.report.message = os.str();
  return res;
}

SelfConsistentResult self_consistent_solve(const Model& m, const WindowPlan& plan, const SolverOptions& opt) {
  return self_consistent_solve(bare_lines(m), m.couplings.g_tilde, plan, opt);
}

std::array<std::vector<double>, 2> polariton_dos(const GreenFunctionSet& G) {
  std::array<std::vector<double>, 2> out;
  for (Branch b : kBranches) {
    const auto& r = G[b].retarded;
    auto& rho = out[idx(b)];
    rho.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rho[i] = -r[i].imag() / std::numbers::pi;
  }
  return out;
}

std::array<Distribution, 2> distribution_function(const GreenFunctionSet& G, double mask_threshold) {
  std::array<Distribution, 2> out;
  for (Branch b : kBranches) {
    const BranchGreen& g = G[b];
    double scale = 0.0;
    for (const cplx& z : g.retarded) scale = std::max(scale, std::abs(z.imag()));
    Distribution& d = out[idx(b)];
    d.occupancy.assign(g.retarded.size(), std::numeric_limits<double>::quiet_NaN());
    d.mask.assign(g.retarded.size(), 0);
    for (std::size_t i = 0; i < g.retarded.size(); ++i) {
      const double im = g.retarded[i].imag();
      if (std::abs(im) <= mask_threshold * scale || im == 0.0) {
        d.mask[i] = 1;
        continue;
      }
      d.occupancy[i] = 0.5 * (g.keldysh[i].imag() / (2.0 * im) - 1.0);
    }
  }
  return out;
}

double distribution_at(const GreenFunctionSet& G, Branch b, std::int64_t j) {
  const double im = G.retarded_at(b, j).imag();
  if (im == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (G.keldysh_at(b, j).imag() / (2.0 * im) - 1.0);
}

double polariton_occupancy(const GreenFunctionSet& G, Branch b) {
  const BranchGreen& g = G[b];
  // n rho = (Im G^R - Im G^K / 2) / (2 pi), free of the division by Im G^R.
  double acc = 0.0;
  for (std::size_t i = 0; i < g.retarded.size(); ++i) acc += g.retarded[i].imag() - 0.5 * g.keldysh[i].imag();
  acc *= G.spacing / kTwoPi;
  const PolaritonLine& l = G.tail.lines[idx(b)];
  const double lo = g.window.lower() - 0.5 * G.spacing, hi = g.window.upper() + 0.5 * G.spacing;
  const double hw = 0.5 * l.width;
  const double inside = (std::atan((hi - l.energy) / hw) - std::atan((lo - l.energy) / hw)) / std::numbers::pi;
  return acc + l.occupancy * (1.0 - inside);
}

Cooperativities effective_cooperativities(const SelfEnergySet& sigma, const GreenFunctionSet& bare) {
  const double h = bare.spacing;
  const PolaritonLine& lm = bare.tail.lines[0];
  const PolaritonLine& lp = bare.tail.lines[1];
  const std::int64_t cm = std::llround(lm.energy / h), cp = std::llround(lp.energy / h);
  auto damping_at = [&](Branch b, std::int64_t j) {
    const BranchSelfEnergy& s = sigma[b];
    if (!s.window.contains(j)) fail(ErrorCode::window_mismatch, "effective_cooperativities: resonance outside window");
    return -2.0 * s.retarded[s.window.offset(j)].imag();
  };
  return {damping_at(Branch::minus, cp - cm) / lm.width, damping_at(Branch::plus, 2 * cm) / lp.width};
}

InstabilityReport instability_report(const LinePair& lines, double g_tilde) {
  InstabilityReport r;
  const Cooperativities c = cooperativities(lines, g_tilde);
  const double km = lines[0].width, np = lines[1].occupancy;
  const double g2 = g_tilde * g_tilde;
  r.c_minus = c.minus;
  r.negative_damping = c.minus < 0.0;
  r.unstable = c.minus <= -1.0;
  r.near_threshold = c.minus > -1.0 && c.minus <= -0.9;
  r.threshold_occupancy = g2 > 0.0 ? km * km / (16.0 * g2) : std::numeric_limits<double>::infinity();
  r.leading_minus_occupancy = 16.0 * g2 * np / (km * km - 16.0 * g2 * np);
  // Coherently pumped amplifier: gain amplitude Q = 4 i g~ sqrt(n+) / kappa-.
  const cplx q = 4.0 * I * g_tilde * std::sqrt(np) / km;
  const double q2 = std::norm(q);
  r.paramp_minus_occupancy = q2 / (1.0 - q2);
  return r;
}

InstabilityReport instability_report(const Model& m) { return instability_report(bare_lines(m), m.couplings.g_tilde); }

}  // namespace omk
