#include "advhopf/scenario.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "advhopf/error.hpp"

namespace advhopf {

namespace {

const std::array<const char*, 14> kModelNumbers{"r0", "K", "d", "a", "r2", "m", "c",
                                                "p0", "c1", "d1", "q1", "eps", "l", "tau"};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {"r0", "K", "d", "a", "r2", "m", "c", "p0", "c1", "d1", "q1", "eps", "l", "tau", "boundary"}},
      {"spectral", {"count"}},
      {"stability", {"modes", "j_max", "tau_max"}},
      {"sweep", {"param", "lo", "hi", "steps"}},
      {"normalform", {"series", "n0", "branch", "j", "check"}},
      {"sim", {"dt", "t_end", "nx", "trace_stride", "snapshot_stride", "history_stride", "amplitude"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::optional<double> as_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

double number(const std::map<std::string, std::string>& e, const std::string& key) {
  const auto it = e.find(key);
  const auto v = as_double(it->second);
  if (!v) config_error("key '" + key + "' expects a number, got '" + it->second + "'");
  return *v;
}

int integer(const std::map<std::string, std::string>& e, const std::string& key) {
  const auto it = e.find(key);
  int v = 0;
  const char* end = it->second.data() + it->second.size();
  auto [ptr, ec] = std::from_chars(it->second.data(), end, v);
  if (ec != std::errc() || ptr != end) config_error("key '" + key + "' expects an integer, got '" + it->second + "'");
  return v;
}

void validate_key(const std::string& key) {
  const auto dot = key.find('.');
  const auto sec = schema().find(key.substr(0, dot));
  if (dot == std::string::npos || sec == schema().end() || !sec->second.contains(key.substr(dot + 1))) {
    config_error("unknown key '" + key + "'");
  }
}

void derive(Scenario& s) {
  const auto& e = s.entries;
  auto has = [&](const std::string& k) { return e.contains(k); };
  for (const char* name : kModelNumbers) {
    const std::string key = std::string("model.") + name;
    if (!has(key)) config_error("missing required key '" + key + "'");
    *s.params.field(name) = number(e, key);
  }
  if (!has("model.boundary")) config_error("missing required key 'model.boundary'");
  const auto b = parse_boundary(e.at("model.boundary"));
  if (!b) config_error("model.boundary must be 'cfd' or 'ff', got '" + e.at("model.boundary") + "'");
  s.params.boundary = *b;
  try {
    s.params.validate();
  } catch (const Error& err) {
    config_error(err.what());
  }

  if (has("spectral.count")) s.eigen_count = integer(e, "spectral.count");
  if (has("stability.modes")) s.stability.n_modes = integer(e, "stability.modes");
  if (has("stability.j_max")) s.stability.j_max = integer(e, "stability.j_max");
  if (has("stability.tau_max")) s.stability.tau_max = number(e, "stability.tau_max");
  if (s.eigen_count < 1) config_error("spectral.count must be >= 1");
  if (s.stability.n_modes < 1) config_error("stability.modes must be >= 1");
  if (s.stability.j_max < 0) config_error("stability.j_max must be >= 0");

  s.sweep.reset();
  const bool any_sweep = has("sweep.param") || has("sweep.lo") || has("sweep.hi") || has("sweep.steps");
  if (any_sweep) {
    for (const char* k : {"sweep.param", "sweep.lo", "sweep.hi", "sweep.steps"}) {
      if (!has(k)) config_error(std::string("missing required key '") + k + "'");
    }
    SweepSpec sw;
    sw.param = e.at("sweep.param");
    if (ModelParams{}.field(sw.param) == nullptr) config_error("sweep.param '" + sw.param + "' is not a model parameter");
    sw.lo = number(e, "sweep.lo");
    sw.hi = number(e, "sweep.hi");
    sw.steps = integer(e, "sweep.steps");
    if (sw.steps < 1) config_error("sweep.steps must be >= 1");
    s.sweep = sw;
  }

  if (has("normalform.series")) s.series = integer(e, "normalform.series");
  if (s.series < 1) config_error("normalform.series must be >= 1");
  s.n0.reset();
  s.branch.reset();
  s.j.reset();
  if (has("normalform.n0")) s.n0 = integer(e, "normalform.n0");
  if (has("normalform.j")) s.j = integer(e, "normalform.j");
  if (has("normalform.branch")) {
    const std::string& v = e.at("normalform.branch");
    if (v == "+" || v == "plus") s.branch = Branch::Plus;
    else if (v == "-" || v == "minus") s.branch = Branch::Minus;
    else config_error("normalform.branch must be '+' or '-'");
  }
  if (has("normalform.check")) {
    const std::string& v = e.at("normalform.check");
    if (v == "true" || v == "1") s.series_check = true;
    else if (v == "false" || v == "0") s.series_check = false;
    else config_error("normalform.check must be true or false");
  }

  if (has("sim.dt")) s.sim.dt = number(e, "sim.dt");
  if (has("sim.t_end")) s.sim.t_end = number(e, "sim.t_end");
  if (has("sim.nx")) s.sim.nx = integer(e, "sim.nx");
  if (has("sim.trace_stride")) s.sim.trace_stride = integer(e, "sim.trace_stride");
  if (has("sim.snapshot_stride")) s.sim.snapshot_stride = integer(e, "sim.snapshot_stride");
  if (has("sim.history_stride")) s.sim.history_stride = integer(e, "sim.history_stride");
  if (has("sim.amplitude")) s.sim.amplitude = number(e, "sim.amplitude");
  if (!(s.sim.dt > 0.0)) config_error("sim.dt must be positive");
  if (!(s.sim.t_end > 0.0)) config_error("sim.t_end must be positive");
  if (s.sim.nx < 3) config_error("sim.nx must be >= 3");
  if (s.sim.trace_stride < 1) config_error("sim.trace_stride must be >= 1");
  if (s.sim.snapshot_stride < 0) config_error("sim.snapshot_stride must be >= 0");
  if (s.sim.history_stride < 1) config_error("sim.history_stride must be >= 1");

  if (has("output.dir")) s.out_dir = e.at("output.dir");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().contains(section)) config_error("unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) config_error("line " + std::to_string(lineno) + ": key outside of any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    validate_key(key);
    if (value.empty()) config_error("key '" + key + "' has an empty value");
    if (!s.entries.emplace(key, value).second) config_error("duplicate key '" + key + "'");
  }
  derive(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot read scenario '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

void set_entry(Scenario& s, const std::string& key, const std::string& value) {
  validate_key(key);
  const std::string v = trim(value);
  if (v.empty()) config_error("key '" + key + "' has an empty value");
  s.entries[key] = v;
  derive(s);
}

std::string scenario_hash(const Scenario& s) {
  std::string canon;
  for (const auto& [key, value] : s.entries) {
    if (key == "output.dir") continue;
    canon += key;
    canon += '=';
    if (const auto v = as_double(value)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", *v);
      canon += buf;
    } else {
      canon += value;
    }
    canon += '\n';
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(canon.data(), canon.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace advhopf
