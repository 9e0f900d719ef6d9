#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"
#include "omk/error.hpp"
#include "omk/keldysh.hpp"
#include "omk/spectrum.hpp"

using namespace omk;

namespace {

Model model_at(double delta_over_wm, double G_over_wm, double g = 1.0, double gamma = 1e-4, double n_th = 0.0) {
  ParamValues v;
  v.mech_freq = 50.0;
  v.detuning = delta_over_wm * 50.0;
  v.drive_coupling = G_over_wm * 50.0;
  v.single_photon_coupling = g;
  v.mech_damping = gamma;
  v.mech_bath_occupancy = n_th;
  return make_model(SystemParams(v));
}

}  // namespace

TEST_CASE("linear spectrum: band flux of each Lorentzian line") {
  const Model m = model_at(-1.0, 0.2, 0.0);
  const GreenFunctionSet G = bare_green(m, plan_windows(m));
  for (Branch b : kBranches) {
    const Polariton& p = m.basis[b];
    const double E = p.energy;
    const SpectrumResult S = cavity_spectrum(m.basis, G, E, 3.0 + G.spacing);
    const double flux = integrated_flux(S, E, 3.0);
    const double ref = oracle::lorentzian_flux(m.dissipation[b].occupancy, p.alpha_d * p.alpha_d,
                                               m.dissipation[b].kappa, 3.0);
    // The other line and the anomalous image contribute far tails only.
    CHECK(flux == doctest::Approx(ref).epsilon(5e-3));
    CHECK(linear_band_flux(m, b, 3.0) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("red-sideband closed form matches the full line flux") {
  for (double x : {0.1, 0.2, 0.3}) {
    const Model m = model_at(-1.0, x, 0.0, 1e-7);
    for (Branch b : kBranches)
      CHECK(linear_line_flux(m, b) == doctest::Approx(red_sideband_flux(x, b)).epsilon(1e-4));
  }
}

TEST_CASE("emission is positive and consistent with the distribution") {
  ParamValues v;
  v.mech_freq = 50.0;
  v.detuning = -50.0;
  v.drive_coupling = resonant_coupling(-50.0, 50.0);
  v.single_photon_coupling = 1.0;
  const Model m = make_model(SystemParams(v));
  const SelfConsistentResult r = self_consistent_solve(m, plan_windows(m));
  for (Branch b : kBranches) {
    const SpectrumResult S = cavity_spectrum(m.basis, r.green, m.basis[b].energy, 5.0);
    for (std::size_t i = 0; i < S.frequency.size(); ++i) {
      CHECK(S.emission[i] >= -1e-14);
      if (!S.masked[i]) CHECK(S.emission[i] == doctest::Approx(2.0 * M_PI * S.density[i] * S.occupancy[i]));
    }
  }
}

TEST_CASE("a band outside the computed spectrum is an error") {
  const Model m = model_at(-1.0, 0.2, 0.0);
  const GreenFunctionSet G = bare_green(m, plan_windows(m));
  const SpectrumResult S = cavity_spectrum(m.basis, G, m.basis[Branch::minus].energy, 2.0);
  CHECK_THROWS_AS(integrated_flux(S, m.basis[Branch::minus].energy, 5.0), Error);
}

TEST_CASE("two-phonon peak is a Lorentzian with the quoted weight") {
  ParamValues v;
  v.mech_freq = 50.0;
  v.detuning = -100.0;
  v.drive_coupling = 2.0;
  v.single_photon_coupling = 0.1;
  v.mech_damping = 1e-3;
  v.mech_bath_occupancy = 100.0;
  const SystemParams p(v);
  const TwoPhononPeak pk = two_phonon_peak(p);
  CHECK(pk.value(pk.center) == doctest::Approx(pk.height));
  CHECK(pk.value(pk.center + pk.width) == doctest::Approx(0.5 * pk.height));
  CHECK(pk.integrated_weight() == doctest::Approx(M_PI * pk.height * pk.width));
  CHECK(pk.optical_damping == doctest::Approx(8.0 / 9.0 * 0.04 * 0.04).epsilon(1e-12));
  CHECK(pk.width == doctest::Approx(1e-3 + pk.optical_damping));
}
