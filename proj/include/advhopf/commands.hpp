#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "advhopf/scenario.hpp"

namespace advhopf {

inline constexpr const char* kVersion = "1.0.0";

struct CommandReport {
  std::vector<std::string> files;     // relative to the output directory, manifest last
  std::vector<std::string> warnings;
  std::string summary;                // one human-readable line
};

/// Dispatches `eigen`, `steady`, `hopf`, `normalform` or `simulate`, writes
/// the artifacts into `out_dir` and finishes with manifest.json.
/// Throws Error; ConfigError for an unknown command.
CommandReport run_command(const Scenario& s, const std::string& command, const std::filesystem::path& out_dir);

/// `%.17g` rendering used for every float written to CSV.
std::string format_float(double v);

}  // namespace advhopf
