#include "advhopf/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "advhopf/error.hpp"
#include "advhopf/normal_form.hpp"
#include "advhopf/sim.hpp"
#include "advhopf/spectral.hpp"
#include "advhopf/stability.hpp"

namespace advhopf {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    report.files.push_back(name);
  }

  void json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

  CommandReport report;

 private:
  fs::path dir_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json params_json(const ModelParams& p) {
  ordered_json j;
  for (const char* name : {"r0", "K", "d", "a", "r2", "m", "c", "p0", "c1", "d1", "q1", "eps", "l", "tau"}) {
    j[name] = *p.field(name);
  }
  j["boundary"] = to_string(p.boundary);
  return j;
}

std::string timestamp() {
  std::time_t t;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void cmd_eigen(const Scenario& s, Writer& w) {
  const std::vector<Mode> modes = modes_for(s.eigen_count, s.params);
  std::string csv = csv_row({"n", "sigma_or_index", "nu"});
  for (const auto& m : modes) {
    const std::string second = (s.params.boundary == Boundary::FF && m.n == 0) ? "" : format_float(m.sigma);
    csv += csv_row({std::to_string(m.n), second, format_float(m.nu)});
  }
  w.write("eigen.csv", csv);
  w.report.summary = std::to_string(modes.size()) + " modes";
}

void cmd_steady(const Scenario& s, Writer& w) {
  const SteadyState st = steady_state(s.params);
  ordered_json j;
  j["response"] = s.params.response() == ResponseKind::HollingI ? "holling1" : "holling2";
  j["u"] = st.u;
  j["v"] = st.v;
  if (s.params.response() == ResponseKind::HollingI) {
    j["m0"] = st.m0;
    j["A1"] = st.A1;
    j["A2"] = st.A2;
    j["A3"] = st.A3;
  } else {
    j["iterations"] = st.iterations;
  }
  w.json("steady.json", j);
  w.report.summary = "u* = " + format_float(st.u) + ", v* = " + format_float(st.v);
}

void cmd_hopf(const Scenario& s, Writer& w) {
  const LinearAnalysis a = analyze(s.params, s.stability.n_modes, s.stability.j_max);
  const StabilityVerdict v = stability_windows(a, s.stability.tau_max);
  std::string windows = csv_row({"tau_lo", "tau_hi"});
  for (const auto& iv : v.stable) windows += csv_row({format_float(iv.lo), format_float(iv.hi)});
  w.write("windows.csv", windows);
  if (v.last_mode_contributes) {
    w.report.warnings.push_back("mode " + std::to_string(a.modes.back().n) +
                                " (the last retained) contributes a crossing below tau_max; raise stability.modes");
  }
  for (const auto& f : v.flags) w.report.warnings.push_back(f);

  const SweepSpec sw = s.sweep.value_or(SweepSpec{"r0", s.params.r0, s.params.r0, 1});
  SweepOptions opt;
  opt.n_modes = s.stability.n_modes;
  opt.j_max = s.stability.j_max;
  opt.tau_max = s.stability.tau_max;
  const auto rows = hopf_curve_sweep(sw.param, sw.lo, sw.hi, sw.steps, s.params, opt);
  std::string curve = csv_row({"param", "n", "branch", "j", "omega", "tau"});
  std::string critical = csv_row({"param", "tau_c"});
  int gaps = 0;
  for (const auto& row : rows) {
    const std::string param = format_float(row.param);
    for (const auto& hp : row.points) {
      curve += csv_row({param, std::to_string(hp.n), to_string(hp.branch), std::to_string(hp.j),
                        format_float(hp.omega), format_float(hp.tau)});
    }
    if (row.critical) {
      critical += csv_row({param, format_float(row.critical->tau)});
    } else {
      critical += csv_row({param, ""});
      ++gaps;
      w.report.warnings.push_back(sw.param + " = " + param + ": " + row.error);
    }
  }
  w.write("hopf_curve.csv", curve);
  w.write("tau_critical.csv", critical);
  std::ostringstream sum;
  sum << v.stable.size() << " stable interval(s); sweep " << rows.size() << " point(s), " << gaps << " gap(s)";
  w.report.summary = sum.str();
}

void cmd_normalform(const Scenario& s, Writer& w) {
  NormalFormOptions opt;
  opt.n_modes = s.stability.n_modes;
  opt.j_max = s.stability.j_max;
  opt.n_series = s.series;
  opt.convergence_check = s.series_check;
  opt.n0 = s.n0;
  opt.branch = s.branch;
  opt.j = s.j;
  const NormalFormResult r = compute_normal_form(s.params, opt);
  const auto& c = r.classification;
  ordered_json j;
  j["n0"] = r.point.n;
  j["branch"] = to_string(r.point.branch);
  j["j"] = r.point.j;
  j["omega"] = r.point.omega;
  j["tau_c"] = r.point.tau;
  j["K20"] = complex_json(r.K.K20);
  j["K11"] = complex_json(r.K.K11);
  j["K02"] = complex_json(r.K.K02);
  j["K21"] = complex_json(r.K.K21);
  j["Gamma1"] = complex_json(c.Gamma1);
  j["Gamma2"] = c.Gamma2;
  j["Gamma3"] = c.Gamma3;
  j["direction"] = to_string(c.direction);
  j["orbit_stability"] = to_string(c.orbit_stability);
  j["dlambda_dtau"] = complex_json(r.transversality.dlambda_dtau);
  j["p1"] = complex_json(r.eigvec.p1);
  j["p2_star"] = complex_json(r.eigvec.p2_star);
  j["Psi"] = complex_json(r.eigvec.Psi);
  j["series"] = r.n_series;
  j["series_change"] = s.series_check ? ordered_json(r.series_change) : ordered_json(nullptr);
  j["warnings"] = r.warnings;
  w.json("normal_form.json", j);
  for (const auto& msg : r.warnings) w.report.warnings.push_back(msg);
  w.report.summary = std::string("tau_c = ") + format_float(r.point.tau) + ", " + to_string(c.direction) + ", " +
                     to_string(c.orbit_stability) + " orbits";
}

void cmd_simulate(const Scenario& s, Writer& w) {
  const SimResult r = run(s.params, s.sim);
  std::string trace = csv_row({"t", "u_mid", "v_mid", "L2u", "L2v", "min_u", "min_v"});
  for (const auto& d : r.trace) {
    trace += csv_row({format_float(d.t), format_float(d.u_mid), format_float(d.v_mid), format_float(d.l2u),
                      format_float(d.l2v), format_float(d.min_u), format_float(d.min_v)});
  }
  w.write("trace.csv", trace);
  ordered_json snaps = ordered_json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const auto& sn = r.snapshots[k];
    char name[48];
    std::snprintf(name, sizeof name, "snapshots/snapshot_%06zu.csv", k);
    std::string csv = csv_row({"x", "u", "v"});
    for (int i = 0; i < r.grid.nx; ++i) {
      csv += csv_row({format_float(r.grid.x[i]), format_float(sn.u[i]), format_float(sn.v[i])});
    }
    w.write(name, csv);
    snaps.push_back({{"file", name}, {"t", sn.t}});
  }
  if (r.clip_count > 0) {
    w.report.warnings.push_back("positivity clip applied " + std::to_string(r.clip_count) + " time(s)");
  }
  const Classification& c = r.classification;
  const ClassifyThresholds th;
  ordered_json j;
  j["params"] = params_json(s.params);
  j["config"] = {{"dt", s.sim.dt},
                 {"t_end", s.sim.t_end},
                 {"nx", s.sim.nx},
                 {"trace_stride", s.sim.trace_stride},
                 {"snapshot_stride", s.sim.snapshot_stride},
                 {"history_stride", s.sim.history_stride},
                 {"amplitude", s.sim.amplitude},
                 {"scheme", "IMEX: Crank-Nicolson diffusion, first-order upwind advection, explicit reaction"}};
  j["classification"] = {{"label", c.label()},
                         {"prey", to_string(c.prey)},
                         {"predator_extinct", c.predator_extinct},
                         {"peaks", c.peaks},
                         {"amplitude_first", c.amplitude_first},
                         {"amplitude_last", c.amplitude_last},
                         {"amplitude_spread", c.amplitude_spread},
                         {"sup_v", c.sup_v}};
  j["thresholds"] = {{"periodic_spread", th.periodic_spread},
                     {"extinction", th.extinction},
                     {"window_fraction", th.window_fraction},
                     {"periodic_peaks", th.periodic_peaks}};
  j["steps"] = r.steps;
  j["cfl_advection"] = r.cfl_advection;
  j["reaction_dt_bound"] = r.reaction_dt_bound;
  j["clip_count"] = r.clip_count;
  j["snapshots"] = snaps;
  w.json("run.json", j);
  w.report.summary = "classification: " + c.label();
}

}  // namespace

CommandReport run_command(const Scenario& s, const std::string& command, const fs::path& out_dir) {
  using Handler = void (*)(const Scenario&, Writer&);
  Handler h = nullptr;
  if (command == "eigen") h = cmd_eigen;
  else if (command == "steady") h = cmd_steady;
  else if (command == "hopf") h = cmd_hopf;
  else if (command == "normalform") h = cmd_normalform;
  else if (command == "simulate") h = cmd_simulate;
  else throw Error(ErrorCode::ConfigError, "unknown command '" + command + "'");

  const std::string started = timestamp();
  Writer w(out_dir);
  h(s, w);

  ordered_json m;
  m["toolkit"] = "advhopf";
  m["version"] = kVersion;
  m["command"] = command;
  m["scenario_hash"] = scenario_hash(s);
  m["started"] = started;
  m["finished"] = timestamp();
  m["summary"] = w.report.summary;
  if (command == "simulate") {
    std::string label = w.report.summary.substr(std::string("classification: ").size());
    m["classification"] = label;
  }
  ordered_json files = w.report.files;
  files.push_back("manifest.json");
  m["files"] = files;
  m["warning_count"] = w.report.warnings.size();
  m["warnings"] = w.report.warnings;
  w.json("manifest.json", m);
  return w.report;
}

}  // namespace advhopf
