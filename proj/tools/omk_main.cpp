#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "omk/omk.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;

int exit_code(omk_status s) {
  switch (s) {
    case OMK_OK: return kExitOk;
    case OMK_CONFIG:
    case OMK_INVALID_ARGUMENT:
    case OMK_IO: return kExitConfig;
    default: return kExitSolver;
  }
}

int report(omk_status s) {
  std::fprintf(stderr, "omk: %s: %s\n", omk_status_name(s), omk_last_error());
  return exit_code(s);
}

omk_scenario* load(const std::string& path, int& code) {
  omk_scenario* sc = nullptr;
  const omk_status s = omk_scenario_load(path.c_str(), &sc);
  if (s != OMK_OK) {
    // A malformed scenario is a configuration problem whatever the parser flagged.
    std::fprintf(stderr, "omk: %s: %s\n", omk_status_name(s), omk_last_error());
    code = kExitConfig;
    return nullptr;
  }
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear optomechanical polariton solver"};
  app.set_version_flag("--version", std::string(omk_version()));
  app.require_subcommand(1);

  std::string path, out_dir = ".";
  int workers = 1;
  bool seed_check = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV and JSON artifacts");
  run->add_option("scenario", path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "parallel sweep workers")->check(CLI::PositiveNumber);
  run->add_flag("--seed-check", seed_check, "rerun serially and require identical artifacts");

  CLI::App* validate = app.add_subcommand("validate", "parse and check a scenario without solving");
  validate->add_option("scenario", path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  int code = kExitOk;
  omk_scenario* sc = load(path, code);
  if (!sc) return code;

  if (validate->parsed()) {
    const omk_status s = omk_scenario_validate(sc);
    omk_scenario_destroy(sc);
    if (s != OMK_OK) {
      std::fprintf(stderr, "omk: %s: %s\n", omk_status_name(s), omk_last_error());
      return kExitConfig;
    }
    std::printf("ok\n");
    return kExitOk;
  }

  const omk_run_options opt{out_dir.c_str(), workers, seed_check ? 1 : 0};
  omk_run_result res{};
  const omk_status s = omk_scenario_run(sc, &opt, &res);
  omk_scenario_destroy(sc);
  if (s != OMK_OK) return report(s);
  if (res.soft_failures > 0)
    std::fprintf(stderr, "omk: %zu of %zu points failed softly; see the JSON summary\n", res.soft_failures,
                 res.points);
  if (seed_check && !res.seed_check_passed) {
    std::fprintf(stderr, "omk: seed check failed: serial rerun produced different artifacts\n");
    return kExitSolver;
  }
  return kExitOk;
}
