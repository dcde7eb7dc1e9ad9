// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "advhopf/error.hpp"
#include "advhopf/normal_form.hpp"
#include "advhopf/scenario.hpp"
#include "advhopf/sim.hpp"
#include "advhopf/spectral.hpp"
#include "advhopf/stability.hpp"

using namespace advhopf;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(ADVHOPF_SOURCE_DIR) / "scenarios";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

ModelParams holling1() { return ModelParams::reference(); }

ModelParams holling2() {
  ModelParams p = ModelParams::reference();
  p.c1 = 0.2;
  return p;
}

Scenario scenario(const std::string& name) { return load_scenario((kScenarios / (name + ".cfg")).string()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void within_time(Outcome& o, double elapsed, double limit, const std::string& what) {
  o.require(elapsed < limit, what + " took " + std::to_string(elapsed) + " s, limit " + std::to_string(limit) + " s");
}

// Mean of the last ten peak-to-trough amplitudes over the second half of the midpoint trace.
double settled_amplitude(const SimResult& r) {
  std::vector<double> y;
  for (std::size_t i = r.trace.size() / 2; i < r.trace.size(); ++i) y.push_back(r.trace[i].u_mid);
  const auto amps = peak_amplitudes(y);
  if (amps.size() < 10) return 0.0;
  return std::accumulate(amps.end() - 10, amps.end(), 0.0) / 10.0;
}

Outcome steady_states() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SteadyState a = steady_state(holling1());
  const SteadyState b = steady_state(holling2());
  const double elapsed = seconds_since(t0);
  o.require(std::abs(a.u - 1.5712) <= 1e-3 && std::abs(a.v - 0.0278) <= 1e-3, "Holling I steady state");
  o.require(std::abs(b.u - 2.2792) <= 1e-3 && std::abs(b.v - 0.0098) <= 1e-3, "Holling II steady state");
  within_time(o, elapsed, 1.0, "steady states");
  o.detail << "HI (" << a.u << ", " << a.v << "), HII (" << b.u << ", " << b.v << ")";
  return o;
}

Outcome critical_delays() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = first_hopf_point(analyze(holling1(), 8, 0));
  const auto b = first_hopf_point(analyze(holling2(), 8, 0));
  const double elapsed = seconds_since(t0);
  o.require(a && std::abs(a->tau - 7.3764) <= 1e-3, "Holling I tau");
  o.require(b && std::abs(b->tau - 8.835) <= 1e-2, "Holling II tau");
  within_time(o, elapsed, 5.0, "critical delays");
  if (a && b) o.detail << "HI tau = " << a->tau << ", HII tau = " << b->tau;
  return o;
}

Outcome windows() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  StabilityOptions opt;
  opt.n_modes = 8;
  opt.j_max = 6;
  opt.tau_max = 60.0;
  const StabilityVerdict v = stability_windows(holling1(), opt);
  const double elapsed = seconds_since(t0);
  o.require(v.stable.size() >= 2, "two stable intervals");
  if (v.stable.size() >= 2) {
    o.require(v.stable[0].lo == 0.0 && std::abs(v.stable[0].hi - 7.3764) <= 1e-2, "first interval");
    o.require(std::abs(v.stable[1].lo - 35.5432) <= 1e-2 && std::abs(v.stable[1].hi - 35.7352) <= 1e-2,
              "second interval");
    o.require(v.stable.size() == 2, "no further stable interval below tau_max");
    o.detail << "[" << v.stable[0].lo << ", " << v.stable[0].hi << ") U (" << v.stable[1].lo << ", "
             << v.stable[1].hi << ")";
  }
  within_time(o, elapsed, 30.0, "windows");
  return o;
}

Outcome sweeps() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SweepOptions opt;
  const auto h1 = hopf_curve_sweep("r0", 0.13, 1.0, 30, holling1(), opt);
  const auto h2 = hopf_curve_sweep("r0", 0.18, 1.0, 30, holling2(), opt);
  const double elapsed = seconds_since(t0);
  o.require(h1.size() == 30 && h2.size() == 30, "30 rows each");
  int gaps1 = 0;
  for (const auto& r : h1) gaps1 += r.critical ? 0 : 1;
  bool decreasing = true;
  for (std::size_t i = 0; i < h2.size(); ++i) {
    if (!h2[i].critical) {
      decreasing = false;
      continue;
    }
    if (i > 0 && h2[i - 1].critical && !(h2[i].critical->tau < h2[i - 1].critical->tau)) decreasing = false;
  }
  o.require(decreasing, "Holling II tau column strictly decreasing");
  within_time(o, elapsed, 120.0, "sweeps");
  o.detail << "HI " << h1.size() << " rows (" << gaps1 << " without a positive steady state), HII tau "
           << (h2.front().critical ? h2.front().critical->tau : NAN) << " -> "
           << (h2.back().critical ? h2.back().critical->tau : NAN);
  return o;
}

Outcome spectral_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    for (double d1 : {0.1, 0.3, 1.0}) {
      for (double q1 : {0.0005, 0.001, 0.01}) {
        ModelParams p = holling1();
        p.d1 = d1;
        p.q1 = q1;
        p.boundary = bc;
        const auto modes = modes_for(5, p);
        const auto fd = finite_difference_eigenvalues(p, 4000, 5);
        for (int i = 0; i < 5; ++i) {
          const double err = modes[i].nu == 0.0 ? std::abs(fd[i]) : std::abs(fd[i] - modes[i].nu) / modes[i].nu;
          worst = std::max(worst, err);
        }
      }
    }
  }
  o.require(worst <= 1e-4, "finite-difference agreement");
  double bio = 0.0;
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    ModelParams p = holling1();
    p.boundary = bc;
    const auto modes = modes_for(bc == Boundary::FF ? 9 : 8, p);
    for (const Mode& m : modes) {
      for (const Mode& n : modes) {
        if (m.n != n.n) bio = std::max(bio, std::abs(mode_integral(IntegralKind::BtB, m, &n)));
      }
    }
  }
  o.require(bio <= 1e-8, "biorthogonality");
  const double elapsed = seconds_since(t0);
  within_time(o, elapsed, 60.0, "spectral oracle");
  o.detail << "max relative FD deviation " << worst << ", max |<bt_m, b_n>| " << bio;
  return o;
}

Outcome residuals() {
  Outcome o;
  double res = 0.0, trig = 0.0;
  int points = 0, tracked = 0, agree = 0;
  for (const ModelParams& p : {holling1(), holling2()}) {
    const LinearAnalysis a = analyze(p, 8, 6);
    for (const HopfPoint& hp : a.points) {
      const ModalChar& mc = a.chars[static_cast<std::size_t>(hp.n - a.chars.front().n)];
      res = std::max(res, std::abs(characteristic(mc, cplx(0.0, hp.omega), hp.tau)));
      trig = std::max(trig, std::abs(hp.cos_value * hp.cos_value + hp.sin_value * hp.sin_value - 1.0));
      ++points;
    }
    // five points per model spread across the list
    const std::size_t stride = std::max<std::size_t>(1, a.points.size() / 5);
    for (std::size_t i = 0; i < a.points.size() && tracked < (p.c1 == 0.0 ? 5 : 10); i += stride) {
      const HopfPoint& hp = a.points[i];
      const ModalChar& mc = a.chars[static_cast<std::size_t>(hp.n - a.chars.front().n)];
      const Transversality t = transversality(mc, hp.branch, hp.omega, hp.tau);
      const cplx num = dlambda_dtau_numeric(mc, hp.omega, hp.tau);
      agree += (num.real() > 0) == (t.sign > 0) ? 1 : 0;
      ++tracked;
    }
  }
  o.require(res <= 1e-10, "characteristic residual");
  o.require(trig <= 1e-10, "trig identity");
  o.require(tracked == 10 && agree == 10, "transversality vs root tracking");
  o.detail << points << " Hopf points, max residual " << res << ", max |C^2+S^2-1| " << trig << ", signs agree "
           << agree << "/" << tracked;
  return o;
}

Outcome normal_form() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  NormalFormOptions opt;
  opt.n_series = 50;
  opt.convergence_check = true;
  const char* names[] = {"HI", "HII"};
  int k = 0;
  for (const ModelParams& p : {holling1(), holling2()}) {
    const NormalFormResult r = compute_normal_form(p, opt);
    const auto& c = r.classification;
    o.require(c.Gamma3 == 2.0 * c.Gamma1.real(), std::string(names[k]) + " Gamma3 identity");
    o.require(r.series_change < 1e-6, std::string(names[k]) + " Lambda series N=50 vs 100 below 1e-6");
    SimConfig cfg;
    const ProbeResult probe = orbit_stability_probe(p, 0.5, cfg, ProbeOptions{4000.0, 0.10, 0.02, r.point.tau});
    const bool predicted_stable = c.Gamma3 < 0.0;
    const bool observed_stable = probe.verdict == OrbitVerdict::StableOrbit;
    o.require(predicted_stable == observed_stable, std::string(names[k]) + " probe sign");
    o.detail << names[k] << ": Gamma3 " << c.Gamma3 << ", series change " << r.series_change << ", probe at tau "
             << probe.tau << " " << to_string(probe.verdict) << " (" << probe.amplitude_small << " vs "
             << probe.amplitude_large << "); ";
    ++k;
  }
  within_time(o, seconds_since(t0), 120.0, "normal form");
  return o;
}

Outcome regimes() {
  Outcome o;
  struct Case {
    const char* name;
    std::function<bool(const Classification&)> ok;
    const char* expect;
  };
  const std::vector<Case> cases{
      {"tau5_cfd", [](const Classification& c) { return c.prey == Regime::Decay && !c.predator_extinct; }, "settling"},
      {"tau8_cfd",
       [](const Classification& c) { return c.prey == Regime::Periodic && c.peaks >= 10 && c.amplitude_spread <= 0.05; },
       "periodic"},
      {"tau8_ff", [](const Classification& c) { return c.prey == Regime::Periodic; }, "periodic"},
      {"tau190_cfd", [](const Classification& c) { return c.prey != Regime::Periodic && c.prey != Regime::Decay; },
       "non-periodic"},
      {"holling2_tau16_ff",
       [](const Classification& c) {
         return c.predator_extinct && c.sup_v < 1e-6 && (c.prey == Regime::Periodic || c.prey == Regime::Irregular);
       },
       "predator extinction with prey oscillation"},
  };
  for (const Case& cs : cases) {
    const Scenario s = scenario(cs.name);
    o.require(s.sim.nx == 201 && s.sim.dt == 0.01, std::string(cs.name) + " uses nx=201, dt=0.01");
    const auto t0 = std::chrono::steady_clock::now();
    const SimResult r = run(s.params, s.sim);
    const double elapsed = seconds_since(t0);
    o.require(cs.ok(r.classification), std::string(cs.name) + " expected " + cs.expect);
    within_time(o, elapsed, 180.0, cs.name);
    o.detail << cs.name << " " << r.classification.label() << " (" << std::lround(elapsed * 10) / 10.0 << " s); ";
  }
  return o;
}

Outcome convergence() {
  Outcome o;
  const Scenario s = scenario("tau8_cfd");
  SimConfig base = s.sim;
  base.snapshot_stride = 0;
  SimConfig fine = base;
  fine.nx = 2 * base.nx - 1;
  fine.dt = base.dt / 4;
  fine.trace_stride = base.trace_stride * 4;
  SimConfig history = base;
  history.history_stride = 2;
  const SimResult a = run(s.params, base);
  const SimResult b = run(s.params, fine);
  const double amp_a = settled_amplitude(a);
  const double amp_b = settled_amplitude(b);
  const double amp_change = std::abs(amp_a - amp_b) / amp_b;
  o.require(amp_a > 0.0 && amp_b > 0.0 && amp_change < 0.01, "peak amplitudes under nx 201->401, dt/4");

  // doubling the history sampling density (stride 2 -> 1) over [0, 200]
  SimConfig shorter = base;
  shorter.t_end = 200.0;
  SimConfig coarse = shorter;
  coarse.history_stride = 2;
  const SimResult c = run(s.params, shorter);
  const SimResult d = run(s.params, coarse);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < c.trace.size() && i < d.trace.size(); ++i) {
    diff = std::max(diff, std::abs(c.trace[i].u_mid - d.trace[i].u_mid));
    scale = std::max(scale, std::abs(c.trace[i].u_mid));
  }
  o.require(c.trace.size() == d.trace.size() && diff / scale < 1e-3, "delay interpolation within 0.1%");
  o.detail << "amplitude " << amp_a << " vs " << amp_b << " (" << 100 * amp_change << "%), history refinement "
           << 100 * diff / scale << "%";
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADVHOPF_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const fs::path root = fs::temp_directory_path() / ("advhopf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  struct Job {
    const char* command;
    const char* scenario;
  };
  const Job jobs[] = {{"eigen", "stability_region"},     {"steady", "holling2_region"},
                      {"hopf", "stability_region"},      {"normalform", "stability_region"},
                      {"simulate", "tau5_cfd"}};
  int files = 0;
  for (const Job& j : jobs) {
    const std::string path = (kScenarios / (std::string(j.scenario) + ".cfg")).string();
    for (const char* copy : {"a", "b"}) {
      const fs::path out = root / j.command / copy;
      o.require(run_cli(std::string(j.command) + " --scenario " + path + " --out " + out.string()) == 0,
                std::string(j.command) + " exit code");
    }
    const fs::path a = root / j.command / "a";
    const fs::path b = root / j.command / "b";
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), a);
      o.require(fs::exists(b / rel) && slurp(e.path()) == slurp(b / rel), std::string(j.command) + ": " + rel.string());
      ++files;
    }
  }
  fs::remove_all(root);
  ::unsetenv("SOURCE_DATE_EPOCH");
  o.detail << files << " files compared byte for byte across two runs of each command";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"steady states", steady_states},
      {"critical delays", critical_delays},
      {"stability windows", windows},
      {"Hopf-curve sweeps", sweeps},
      {"spectral oracle", spectral_oracle},
      {"characteristic residuals", residuals},
      {"normal form", normal_form},
      {"simulation regimes", regimes},
      {"numerical convergence", convergence},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double elapsed = seconds_since(t0);
    if (!o.pass) ++failures;
    std::printf("%s  %2zu %-26s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str(), elapsed);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
