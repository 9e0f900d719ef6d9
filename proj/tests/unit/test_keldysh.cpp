#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "omk/error.hpp"
#include "omk/keldysh.hpp"
#include "omk/model.hpp"

using namespace omk;

namespace {

Model resonant_model(double delta_over_wm = -1.0, double gamma = 1e-4, double n_th = 0.0, double g = 1.0) {
  ParamValues v;
  v.mech_freq = 50.0;
  v.detuning = delta_over_wm * 50.0;
  v.drive_coupling = resonant_coupling(v.detuning, v.mech_freq);
  v.single_photon_coupling = g;
  v.mech_damping = gamma;
  v.mech_bath_occupancy = n_th;
  return make_model(SystemParams(v));
}

WindowOptions small_windows() {
  WindowOptions o;
  o.min_points = 4096;
  return o;
}

}  // namespace

TEST_CASE("window plan shares one lattice and centres the windows") {
  const Model m = resonant_model();
  const WindowPlan plan = plan_windows(m, small_windows());
  CHECK(plan[Branch::minus].size == plan[Branch::plus].size);
  CHECK((plan.points & (plan.points - 1)) == 0);
  CHECK(plan.spacing <= plan.narrowest_width / 20.0 + 1e-15);
  CHECK(plan[Branch::minus].contains(std::llround(m.basis[Branch::minus].energy / plan.spacing)));
  CHECK(plan[Branch::plus].contains(std::llround(m.basis[Branch::plus].energy / plan.spacing)));
  WindowOptions tiny;
  tiny.max_points = 1024;
  CHECK_THROWS_AS(plan_windows(m, tiny), Error);
}

TEST_CASE("bare Green functions: sum rule and standard Keldysh relation") {
  const Model m = resonant_model();
  const WindowPlan plan = plan_windows(m, small_windows());
  const GreenFunctionSet G = bare_green(m, plan);
  const auto dos = polariton_dos(G);
  const auto dist = distribution_function(G);
  const LinePair lines = bare_lines(m);
  for (Branch b : kBranches) {
    double sum = 0.0;
    for (double r : dos[idx(b)]) sum += r * plan.spacing;
    // The window spans +-W around the line; the Lorentzian tails beyond carry (2/pi) atan(...) less.
    const double W = 0.5 * static_cast<double>(plan.points) * plan.spacing;
    const double expected = (2.0 / M_PI) * std::atan(W / (0.5 * lines[idx(b)].width));
    CHECK(sum == doctest::Approx(expected).epsilon(2e-3));
    for (std::size_t i = 0; i < G[b].retarded.size(); i += 97) {
      const cplx gk = G[b].keldysh[i], gr = G[b].retarded[i];
      CHECK(gk.real() == doctest::Approx(0.0));
      CHECK(gk.imag() == doctest::Approx(2.0 * (2.0 * lines[idx(b)].occupancy + 1.0) * gr.imag()).epsilon(1e-12));
      CHECK(gr.imag() < 0.0);
    }
    for (std::size_t i = 0; i < dist[idx(b)].occupancy.size(); i += 211)
      if (!dist[idx(b)].mask[i]) CHECK(dist[idx(b)].occupancy[i] == doctest::Approx(lines[idx(b)].occupancy));
  }
}

TEST_CASE("leading self-energies are causal and obey Kramers-Kronig") {
  const Model m = resonant_model();
  const WindowPlan plan = plan_windows(m, small_windows());
  const SelfEnergySet S = bubble_self_energy(bare_green(m, plan), m.couplings.g_tilde);
  for (Branch b : kBranches) {
    const auto& r = S[b].retarded;
    std::vector<double> im(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) im[i] = r[i].imag();
    const auto re = oracle::kramers_kronig(im, plan.spacing);
    double peak = 0.0, err = 0.0;
    for (std::size_t i = r.size() / 4; i < 3 * r.size() / 4; ++i) {
      peak = std::max(peak, std::abs(r[i]));
      err = std::max(err, std::abs(re[i] - r[i].real()));
    }
    CHECK(err / peak < 0.02);
    // Sigma^K is purely imaginary and sits below 2 Im Sigma^R in magnitude ordering for n >= 0 baths.
    for (std::size_t i = 0; i < r.size(); i += 101) CHECK(S[b].keldysh[i].real() == doctest::Approx(0.0));
  }
  // The + polariton only decays into -- pairs; its interaction damping is positive.
  for (double d : S[Branch::plus].interaction_damping()) CHECK(d >= -1e-15);
}

TEST_CASE("cooperativities and interaction baths at leading order") {
  const Model m = resonant_model();
  const LinePair l = bare_lines(m);
  const double g = m.couplings.g_tilde;
  const Cooperativities c = cooperativities(l, g);
  const double km = l[0].width, kp = l[1].width, nm = l[0].occupancy, np = l[1].occupancy;
  const SelfEnergySet S = leading_self_energy(m, plan_windows(m, small_windows()));
  const std::int64_t jm = std::llround(l[0].energy / S[Branch::minus].window.spacing);
  const std::int64_t jp = std::llround(l[1].energy / S[Branch::plus].window.spacing);
  const double gm = S[Branch::minus].interaction_damping()[S[Branch::minus].window.offset(jm)];
  const double gp = S[Branch::plus].interaction_damping()[S[Branch::plus].window.offset(jp)];
  // C = Gamma_int(E) / kappa; E- sits within half a grid step of the lattice point.
  CHECK(c.minus == doctest::Approx(gm / km).epsilon(1e-3));
  CHECK(c.plus == doctest::Approx(gp / kp).epsilon(1e-3));
  // Rate balance: + decays into -- pairs; - merges with - into +.
  const InteractionOccupancies ni = interaction_occupancies(l);
  CHECK(ni.plus == doctest::Approx(nm * nm / (1.0 + 2.0 * nm)).epsilon(1e-12));
  CHECK(ni.minus == doctest::Approx(np * (1.0 + nm) / (nm - np)).epsilon(1e-12));
}

TEST_CASE("zero coupling: self-consistent solution is the bare one after one step") {
  const Model m = resonant_model(-1.0, 1e-4, 0.0, 0.0);
  const WindowPlan plan = plan_windows(m, small_windows());
  const SelfConsistentResult r = self_consistent_solve(m, plan);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  const GreenFunctionSet bare = bare_green(m, plan);
  for (Branch b : kBranches)
    for (std::size_t i = 0; i < bare[b].retarded.size(); i += 53)
      CHECK(std::abs(r.green[b].retarded[i] - bare[b].retarded[i]) < 1e-14);
}

TEST_CASE("self-consistent iteration contracts at the red-sideband point") {
  const Model m = resonant_model();
  const SelfConsistentResult r = self_consistent_solve(m, plan_windows(m));
  REQUIRE(r.report.deltas.size() >= 5);
  for (std::size_t k = 3; k < r.report.deltas.size(); ++k) CHECK(r.report.deltas[k] < r.report.deltas[k - 1]);
  CHECK(r.report.deltas.back() < 1e-6);
  // Dressing reduces the - polariton occupancy below its leading-order peak value.
  CHECK(polariton_occupancy(r.green, Branch::minus) < leading_peak_occupancy(bare_lines(m), m.couplings.g_tilde,
                                                                               Branch::minus));
}

TEST_CASE("windows on different lattices are rejected") {
  const Model m = resonant_model();
  const WindowPlan plan = plan_windows(m, small_windows());
  GreenFunctionSet G = bare_green(m, plan);
  G[Branch::plus].window.first += static_cast<std::int64_t>(G[Branch::plus].window.size);
  try {
    bubble_self_energy(G, m.couplings.g_tilde);
    FAIL("expected a window mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::window_mismatch);
  }
}

TEST_CASE("instability report flags") {
  const Model m = resonant_model(-0.65, 1e-3, 650.0);
  const InstabilityReport r = instability_report(m);
  CHECK(r.negative_damping);
  CHECK(r.near_threshold);
  CHECK_FALSE(r.unstable);
  CHECK(r.leading_minus_occupancy == doctest::Approx(r.paramp_minus_occupancy).epsilon(1e-12));
  const InstabilityReport q = instability_report(resonant_model());
  CHECK_FALSE(q.negative_damping);
  const Model hot = resonant_model(-0.65, 1e-3, 2000.0);
  CHECK(instability_report(hot).unstable);
  CHECK(std::isinf(leading_peak_occupancy(bare_lines(hot), hot.couplings.g_tilde, Branch::minus)));
}
