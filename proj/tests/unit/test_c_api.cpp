#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "omk/omk.h"

TEST_CASE("model handle round trip") {
  omk_params p;
  omk_params_default(&p);
  p.detuning = -50.0;
  p.mech_freq = 50.0;
  REQUIRE(omk_resonant_coupling(p.detuning, p.mech_freq, &p.drive_coupling) == OMK_OK);
  p.single_photon_coupling = 1.0;
  omk_model* m = nullptr;
  REQUIRE(omk_model_create(&p, &m) == OMK_OK);
  omk_polariton lo{}, hi{};
  CHECK(omk_model_polariton(m, OMK_MINUS, &lo) == OMK_OK);
  CHECK(omk_model_polariton(m, OMK_PLUS, &hi) == OMK_OK);
  CHECK(hi.energy == doctest::Approx(2.0 * lo.energy));
  double cm = 0, cp = 0;
  CHECK(omk_model_cooperativities(m, &cm, &cp) == OMK_OK);
  CHECK(cm == doctest::Approx(0.1757).epsilon(1e-3));
  CHECK(cp == doctest::Approx(2.4603).epsilon(1e-3));

  omk_solve_options o;
  omk_solve_options_default(&o);
  omk_solution* s = nullptr;
  REQUIRE(omk_solve(m, &o, &s) == OMK_OK);
  omk_window w{};
  CHECK(omk_solution_window(s, OMK_MINUS, &w) == OMK_OK);
  std::vector<double> dos(w.size);
  CHECK(omk_solution_dos(s, OMK_MINUS, dos.data(), dos.size()) == OMK_OK);
  CHECK(omk_solution_dos(s, OMK_MINUS, dos.data(), dos.size() - 1) == OMK_INVALID_ARGUMENT);
  CHECK(std::strlen(omk_last_error()) > 0);
  double flux = 0.0;
  CHECK(omk_solution_flux(s, lo.energy, 5.0, &flux) == OMK_OK);
  CHECK(flux > 0.0);
  size_t n = 0;
  CHECK(omk_solution_spectrum_size(s, 1.0, &n) == OMK_OK);
  std::vector<double> f(n), e(n);
  CHECK(omk_solution_spectrum(s, lo.energy, 1.0, f.data(), e.data(), nullptr, n) == OMK_OK);
  omk_solution_destroy(s);
  omk_model_destroy(m);
}

TEST_CASE("errors map to status codes") {
  omk_params p;
  omk_params_default(&p);
  p.detuning = -50.0;
  p.drive_coupling = 40.0;  // beyond the instability
  omk_model* m = nullptr;
  CHECK(omk_model_create(&p, &m) == OMK_DOMAIN);
  CHECK(m == nullptr);
  CHECK(std::string(omk_status_name(OMK_DOMAIN)) == "domain");
  CHECK(omk_model_create(nullptr, &m) == OMK_INVALID_ARGUMENT);
  omk_scenario* sc = nullptr;
  CHECK(omk_scenario_parse("kind = nonsense\n", &sc) == OMK_CONFIG);
}

TEST_CASE("scenario run through the C API") {
  omk_scenario* sc = nullptr;
  REQUIRE(omk_scenario_parse("name = capi\nkind = linear_sweep\ndelta_over_omega_m = -1.5:-0.6:4\n", &sc) == OMK_OK);
  CHECK(omk_scenario_points(sc) == 4);
  CHECK(omk_scenario_validate(sc) == OMK_OK);
  const auto dir = std::filesystem::temp_directory_path() / "omk_capi_test";
  const std::string out = dir.string();
  omk_run_options o{out.c_str(), 2, 1};
  omk_run_result r{};
  CHECK(omk_scenario_run(sc, &o, &r) == OMK_OK);
  CHECK(r.points == 4);
  CHECK(r.seed_check_passed == 1);
  CHECK(std::filesystem::exists(dir / "capi.csv"));
  CHECK(std::filesystem::exists(dir / "capi.json"));
  omk_scenario_destroy(sc);
}

TEST_CASE("Lindblad through the C API") {
  omk_params p;
  omk_params_default(&p);
  p.detuning = -50.0;
  omk_resonant_coupling(-50.0, 50.0, &p.drive_coupling);
  p.single_photon_coupling = 1.0;
  omk_model* m = nullptr;
  REQUIRE(omk_model_create(&p, &m) == OMK_OK);
  omk_lindblad_options lo;
  omk_lindblad_options_default(&lo);
  omk_lindblad_result r{};
  CHECK(omk_lindblad_solve(m, &lo, &r) == OMK_OK);
  CHECK(r.levels_minus >= 5);
  CHECK(r.occupancy_minus > 0.0);
  omk_model_destroy(m);
}
