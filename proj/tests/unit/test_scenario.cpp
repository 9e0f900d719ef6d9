#include <doctest.h>

#include <string>

#include <json.hpp>

#include "omk/error.hpp"
#include "omk/scenario.hpp"

using namespace omk;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    validate_scenario(parse_scenario(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

const char* kSweep = R"(kind = cooperativity_sweep
solver = leading
omega_m_over_kappa = 50
delta_over_omega_m = -1.9:-0.6:6
g = 1
)";

}  // namespace

TEST_CASE("configuration errors") {
  CHECK(parse_error("kind = linear_sweep\ndelta_over_omega_m = -1:-0.5:0\n") == ErrorCode::config);
  CHECK(parse_error("kind = linear_sweep\nfoo = 1\ndelta_over_omega_m = -1:-0.5:3\n") == ErrorCode::config);
  CHECK(parse_error("kind = linear_sweep\ng = 1\ng = 2\ndelta_over_omega_m = -1:-0.5:3\n") == ErrorCode::config);
  CHECK(parse_error("kind = linear_sweep\ndelta_over_omega_m = -1:-0.5:3\nn_th = 0:1:3\n") == ErrorCode::config);
  CHECK(parse_error("kind = instability_scan\nsolver = lindblad\ndelta_over_omega_m = -0.7:-0.6:3\n") ==
        ErrorCode::config);
  CHECK(parse_error("kind = spectrum_point\nsolver = leading\ndelta_over_omega_m = -1:-0.5:3\n") ==
        ErrorCode::config);
  CHECK(parse_error("kind = linear_sweep\nkappa = 2\ndelta_over_omega_m = -1:-0.5:3\n") == ErrorCode::config);
  CHECK(parse_error("kind = bogus\n") == ErrorCode::config);
  CHECK(parse_error("solver = leading\n") == ErrorCode::config);
}

TEST_CASE("ranges and defaults") {
  const Scenario s = parse_scenario(kSweep);
  CHECK(s.points() == 6);
  CHECK(s.sweep == SweepVariable::detuning);
  CHECK(s.resonant_drive);
  CHECK(s.point(0).detuning == doctest::Approx(-95.0));
  CHECK(s.point(5).detuning == doctest::Approx(-30.0));
  const Scenario lin = parse_scenario("kind = linear_sweep\nG_over_omega_m = 0.3,0.1,0.2,0.1\n");
  CHECK(lin.solver == SolverKind::linear);
  CHECK(lin.points() == 3);
  CHECK(lin.point(0).drive_coupling == doctest::Approx(0.1 * lin.omega_m));
}

TEST_CASE("output does not depend on the worker count") {
  const Scenario s = parse_scenario(kSweep);
  const RenderedRun a = render_scenario(s, 1), b = render_scenario(s, 3);
  CHECK(a.csv == b.csv);
  CHECK(a.json == b.json);
  CHECK(a.csv.find('\r') == std::string::npos);
  CHECK(a.csv.rfind("solver,delta_over_omega_m[1],", 0) == 0);
  const auto j = nlohmann::ordered_json::parse(a.json);
  CHECK(j["tool"] == "omk");
  CHECK(j["points"].size() == 6);
  CHECK(j.begin().key() == "tool");
}

TEST_CASE("soft failures leave empty cells and a note") {
  // The last point sits past the instability for this drive.
  const Scenario s = parse_scenario(
      "kind = linear_sweep\nomega_m_over_kappa = 50\nG_over_omega_m = 0.2,0.45,0.6\ndelta_over_omega_m = -1\n");
  const RenderedRun r = render_scenario(s, 2);
  CHECK(r.soft_failures == 1);
  CHECK(r.hard_failures == 0);
  const auto last = r.csv.substr(r.csv.rfind("linear,0.6"));
  CHECK(last.find(",,") != std::string::npos);
  const auto j = nlohmann::ordered_json::parse(r.json);
  CHECK(j["points"][2]["status"] == "soft_failure");
  CHECK(j["points"][2]["message"].get<std::string>().find("domain") != std::string::npos);
}

TEST_CASE("spectrum point writes both blocks") {
  const Scenario s = parse_scenario(R"(kind = spectrum_point
solver = leading
delta_over_omega_m = -1
g = 1
spectrum_half_width = 1
)");
  const RenderedRun r = render_scenario(s, 1);
  CHECK(r.csv.find("leading,minus,") != std::string::npos);
  CHECK(r.csv.find("leading,plus,") != std::string::npos);
}
