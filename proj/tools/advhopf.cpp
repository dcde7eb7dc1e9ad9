#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "advhopf/advhopf.h"

namespace {

int report(advhopf_status st) {
  std::fprintf(stderr, "advhopf: %s\n", advhopf_last_error());
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-induced Hopf analysis and simulation for an advective predator-prey model"};
  app.set_version_flag("--version", advhopf_version());
  std::string command;
  std::string scenario_path;
  std::string out_dir;
  int modes = 0;
  int series = 0;
  std::string tau;
  app.add_option("command", command, "eigen | steady | hopf | normalform | simulate")
      ->required()
      ->check(CLI::IsMember({"eigen", "steady", "hopf", "normalform", "simulate"}));
  app.add_option("--scenario", scenario_path, "scenario file")->required();
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--modes", modes, "modes for eigen and stability scans")->check(CLI::PositiveNumber);
  app.add_option("--series", series, "Lambda-series length for normalform")->check(CLI::PositiveNumber);
  app.add_option("--tau", tau, "override the delay");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ADVHOPF_CONFIG_ERROR;
  }

  advhopf_scenario* s = nullptr;
  if (advhopf_status st = advhopf_scenario_load(scenario_path.c_str(), &s); st != ADVHOPF_OK) return report(st);

  auto set = [&](const char* key, const std::string& value) {
    advhopf_status st = advhopf_scenario_set(s, key, value.c_str());
    return st;
  };
  advhopf_status st = ADVHOPF_OK;
  if (modes > 0) {
    st = set("stability.modes", std::to_string(modes));
    if (st == ADVHOPF_OK) st = set("spectral.count", std::to_string(modes));
  }
  if (st == ADVHOPF_OK && series > 0) st = set("normalform.series", std::to_string(series));
  if (st == ADVHOPF_OK && !tau.empty()) st = set("model.tau", tau);
  if (st != ADVHOPF_OK) {
    advhopf_scenario_free(s);
    return report(st);
  }

  char summary[512];
  int warnings = 0;
  st = advhopf_run(s, command.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), summary, sizeof summary, &warnings);
  advhopf_scenario_free(s);
  if (st != ADVHOPF_OK) return report(st);
  std::printf("%s: %s\n", command.c_str(), summary);
  if (warnings > 0) std::fprintf(stderr, "advhopf: %d warning(s), see manifest.json\n", warnings);
  return 0;
}
