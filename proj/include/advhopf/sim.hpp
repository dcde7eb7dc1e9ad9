#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advhopf/model.hpp"

namespace advhopf {

struct Grid {
  int nx = 0;
  double dx = 0.0;
  std::vector<double> x;

  Grid() = default;
  Grid(int nx, double length);
};

/// Past prey fields sampled every `spacing` time units, linearly interpolated.
class HistoryBuffer {
 public:
  HistoryBuffer(const std::vector<double>& initial, double spacing, double tau);

  /// Appends the sample for time index `k` (time k * spacing).
  void push(const std::vector<double>& field);

  /// Fills `out` with u(t_query). Times before zero return the initial
  /// field; times after the newest sample interpolate toward `current`
  /// taken at `t_now`.
  void at(double t_query, const std::vector<double>& current, double t_now, std::vector<double>& out) const;

  double spacing() const noexcept { return spacing_; }

 private:
  std::vector<double> initial_;
  std::vector<std::vector<double>> ring_;
  double spacing_;
  std::int64_t newest_ = -1;  // index of the newest stored sample
};

struct SimConfig {
  double dt = 0.01;
  double t_end = 500.0;
  int nx = 201;
  int trace_stride = 10;      // steps between trace rows
  int snapshot_stride = 0;    // steps between snapshots; 0 keeps only the final field
  int history_stride = 1;     // steps between stored history samples
  double amplitude = 0.01;    // u0 = u* + amplitude cos x, same for v
  double theta = 0.5;         // diffusion weight (0.5 is Crank-Nicolson)
  bool reaction = true;       // false leaves pure transport, used by the conservation checks
  bool advection = true;
};

struct Diagnostics {
  double t = 0.0;
  double u_mid = 0.0;
  double v_mid = 0.0;
  double l2u = 0.0;
  double l2v = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
};

struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  Diagnostics diag;
};

/// Trajectory label from the midpoint prey trace.
enum class Regime { Decay, Periodic, Irregular, Growing };

const char* to_string(Regime r) noexcept;

struct Classification {
  Regime prey = Regime::Decay;
  bool predator_extinct = false;
  int peaks = 0;                   // peaks of the midpoint trace inside the analysis window
  double amplitude_first = 0.0;    // peak-to-trough amplitudes at the window edges
  double amplitude_last = 0.0;
  double amplitude_spread = 0.0;   // max relative deviation over the last ten amplitudes
  double sup_v = 0.0;              // sup of the final predator field

  /// "decay", "periodic", "irregular", "growing", or
  /// "extinction(predator)+<prey label>".
  std::string label() const;
};

struct ClassifyThresholds {
  double periodic_spread = 0.05;
  double extinction = 1e-6;
  double window_fraction = 0.5;  // analyse the last half of the trace
  double flat = 1e-9;            // peak-to-trough below this counts as settled
  int periodic_peaks = 10;
};

Classification classify_trace(const std::vector<Diagnostics>& trace, double sup_v_final,
                              const ClassifyThresholds& th = {});

/// Peak-to-trough amplitudes of successive peaks of `y`.
std::vector<double> peak_amplitudes(const std::vector<double>& y);

struct SimResult {
  Grid grid;
  std::vector<Diagnostics> trace;
  std::vector<FieldSnapshot> snapshots;
  Classification classification;
  std::int64_t clip_count = 0;   // negative overshoots below -1e-10 that were clipped
  std::int64_t steps = 0;
  double cfl_advection = 0.0;    // max q dt / dx
  double reaction_dt_bound = 0.0;
};

/// Explicit-part stability limits. Throws CflViolation naming the bound.
void check_cfl(const ModelParams& p, const SimConfig& cfg, double dx);

class Simulator {
 public:
  Simulator(const ModelParams& p, const SimConfig& cfg);

  /// Initial fields u* + A cos x, v* + A cos x with constant history. Under
  /// CF/D the downstream node is set to zero.
  void build_initial(double amplitude);
  void set_fields(std::vector<double> u, std::vector<double> v);

  void step();
  double time() const noexcept { return static_cast<double>(k_) * cfg_.dt; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& v() const noexcept { return v_; }
  const Grid& grid() const noexcept { return grid_; }
  std::int64_t clip_count() const noexcept { return clips_; }
  Diagnostics diagnostics() const;

 private:
  struct Tridiag {
    std::vector<double> lo, di, up;       // explicit operator A (lo[i] couples i-1, up[i] couples i+1)
    std::vector<double> cprime, denom;    // Thomas factorization of I - theta r A
    double r = 0.0;
  };
  Tridiag build_operator(double D, double q) const;
  void apply_explicit(const Tridiag& T, const std::vector<double>& w, std::vector<double>& out) const;
  void solve(const Tridiag& T, std::vector<double>& rhs) const;
  double upwind(const std::vector<double>& w, int i, double q, double D) const;

  ModelParams p_;
  SimConfig cfg_;
  Grid grid_;
  SteadyState steady_;
  Tridiag opu_, opv_;
  std::vector<double> u_, v_, lag_, ru_, rv_;
  std::optional<HistoryBuffer> history_;
  std::int64_t k_ = 0;
  std::int64_t clips_ = 0;
};

/// Full run with trace, snapshots and classification.
SimResult run(const ModelParams& p, const SimConfig& cfg);

enum class OrbitVerdict { StableOrbit, UnstableOrbit, NoOrbit };

const char* to_string(OrbitVerdict v) noexcept;

struct ProbeResult {
  OrbitVerdict verdict = OrbitVerdict::NoOrbit;
  double tau = 0.0;
  double amplitude_small = 0.0;   // settled oscillation amplitude from the 0.01 start
  double amplitude_large = 0.0;   // from the 0.05 start
  Classification small;
  Classification large;
};

struct ProbeOptions {
  double t_end = 4000.0;
  double agreement = 0.10;
  double settle = 0.02;   // relative drift allowed over the last analysis window
  std::optional<double> tau_c;  // critical delay; computed when absent
};

/// Runs amplitude 0.01 and 0.05 starts at tau_c + tau_offset in parallel.
/// Throws Inconclusive when either run has not settled by t_end.
ProbeResult orbit_stability_probe(const ModelParams& p, double tau_offset, const SimConfig& base,
                                  const ProbeOptions& opt = {});

}  // namespace advhopf
