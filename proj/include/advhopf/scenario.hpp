#pragma once

#include <map>
#include <optional>
#include <string>

#include "advhopf/model.hpp"
#include "advhopf/sim.hpp"
#include "advhopf/stability.hpp"

namespace advhopf {

struct SweepSpec {
  std::string param = "r0";
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;
};

/// A parsed scenario file. Format: flat `key = value` lines grouped under
/// `[section]` headers, `#` starts a comment. Sections and keys:
///
///   [model]      r0 K d a r2 m c p0 c1 d1 q1 eps l tau boundary (all required)
///   [spectral]   count
///   [stability]  modes j_max tau_max
///   [sweep]      param lo hi steps
///   [normalform] series n0 branch j check
///   [sim]        dt t_end nx trace_stride snapshot_stride history_stride amplitude
///   [output]     dir
struct Scenario {
  ModelParams params;
  int eigen_count = 8;
  StabilityOptions stability;
  std::optional<SweepSpec> sweep;
  int series = 50;
  bool series_check = true;
  std::optional<int> n0;
  std::optional<Branch> branch;
  std::optional<int> j;
  SimConfig sim;
  std::string out_dir = "out";

  /// Canonical `section.key` -> value text after whitespace trimming, used
  /// for hashing and for round-tripping overrides.
  std::map<std::string, std::string> entries;
};

/// Throws Error(ConfigError) naming the offending key or line.
Scenario parse_scenario(const std::string& text);

/// Throws Error(IoError) when the file cannot be read.
Scenario load_scenario(const std::string& path);

/// Sets `section.key` to `value` and re-derives the typed fields.
void set_entry(Scenario& s, const std::string& key, const std::string& value);

/// SHA-256 (hex) of the canonical entry list; numbers are normalized so that
/// formatting, whitespace and key order do not change the hash.
std::string scenario_hash(const Scenario& s);

}  // namespace advhopf
