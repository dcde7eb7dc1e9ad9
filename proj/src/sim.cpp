#include "advhopf/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "advhopf/error.hpp"
#include "advhopf/stability.hpp"
#include "parallel.hpp"

namespace advhopf {

Grid::Grid(int nx_, double length) : nx(nx_) {
  if (nx < 3) throw Error(ErrorCode::InvalidArgument, "grid needs at least 3 nodes");
  dx = length / (nx - 1);
  x.resize(nx);
  for (int i = 0; i < nx; ++i) x[i] = i * dx;
  x.back() = length;
}

HistoryBuffer::HistoryBuffer(const std::vector<double>& initial, double spacing, double tau)
    : initial_(initial), spacing_(spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "history spacing must be positive");
  const auto cap = static_cast<std::size_t>(std::ceil(tau / spacing)) + 3;
  ring_.assign(cap, initial);
}

void HistoryBuffer::push(const std::vector<double>& field) {
  ++newest_;
  ring_[static_cast<std::size_t>(newest_) % ring_.size()] = field;
}

void HistoryBuffer::at(double t_query, const std::vector<double>& current, double t_now,
                       std::vector<double>& out) const {
  out.resize(initial_.size());
  if (t_query <= 0.0 || newest_ < 0) {
    out = initial_;
    return;
  }
  const double s = t_query / spacing_;
  auto s0 = static_cast<std::int64_t>(std::floor(s));
  const auto cap = static_cast<std::int64_t>(ring_.size());
  if (s0 < newest_ - cap + 1) throw Error(ErrorCode::InvalidArgument, "history query older than the buffer");
  const std::vector<double>* a;
  const std::vector<double>* b;
  double frac;
  if (s0 >= newest_) {
    s0 = newest_;
    a = &ring_[static_cast<std::size_t>(s0 % cap)];
    b = &current;
    const double t0 = static_cast<double>(s0) * spacing_;
    frac = t_now > t0 ? (t_query - t0) / (t_now - t0) : 0.0;
  } else {
    a = &ring_[static_cast<std::size_t>(s0 % cap)];
    b = &ring_[static_cast<std::size_t>((s0 + 1) % cap)];
    frac = s - static_cast<double>(s0);
  }
  if (frac == 0.0) {
    out = *a;
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - frac) * (*a)[i] + frac * (*b)[i];
}

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Decay: return "decay";
    case Regime::Periodic: return "periodic";
    case Regime::Irregular: return "irregular";
    case Regime::Growing: return "growing";
  }
  return "decay";
}

std::string Classification::label() const {
  if (predator_extinct) return std::string("extinction(predator)+") + to_string(prey);
  return to_string(prey);
}

std::vector<double> peak_amplitudes(const std::vector<double>& y) {
  std::vector<double> amps;
  std::optional<std::size_t> prev;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    if (prev) {
      const double trough = *std::min_element(y.begin() + static_cast<std::ptrdiff_t>(*prev),
                                              y.begin() + static_cast<std::ptrdiff_t>(i));
      amps.push_back(y[i] - trough);
    }
    prev = i;
  }
  return amps;
}

Classification classify_trace(const std::vector<Diagnostics>& trace, double sup_v_final, const ClassifyThresholds& th) {
  Classification c;
  c.sup_v = sup_v_final;
  c.predator_extinct = sup_v_final < th.extinction;
  const auto start = static_cast<std::size_t>(std::floor((1.0 - th.window_fraction) * trace.size()));
  std::vector<double> y;
  y.reserve(trace.size() - start);
  for (std::size_t i = start; i < trace.size(); ++i) y.push_back(trace[i].u_mid);
  if (y.size() < 3) return c;

  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double level = std::max(1.0, std::abs(y.back()));
  if (*hi - *lo < th.flat * level) return c;

  std::vector<double> amps = peak_amplitudes(y);
  if (!amps.empty()) {
    const double big = *std::max_element(amps.begin(), amps.end());
    std::erase_if(amps, [&](double a) { return a < 1e-3 * big; });
  }
  c.peaks = static_cast<int>(amps.size());
  if (amps.size() < 2) return c;
  c.amplitude_first = amps.front();
  c.amplitude_last = amps.back();

  const std::size_t tail = std::min<std::size_t>(amps.size(), static_cast<std::size_t>(th.periodic_peaks));
  const double mean = std::accumulate(amps.end() - static_cast<std::ptrdiff_t>(tail), amps.end(), 0.0) / tail;
  for (auto it = amps.end() - static_cast<std::ptrdiff_t>(tail); it != amps.end(); ++it) {
    c.amplitude_spread = std::max(c.amplitude_spread, std::abs(*it - mean) / mean);
  }
  const double ratio = c.amplitude_last / c.amplitude_first;
  const bool decreasing = std::is_sorted(amps.rbegin(), amps.rend());
  const bool increasing = std::is_sorted(amps.begin(), amps.end());

  if (decreasing && ratio < 0.5) c.prey = Regime::Decay;
  else if (increasing && ratio > 2.0) c.prey = Regime::Growing;
  else if (static_cast<int>(amps.size()) >= th.periodic_peaks && c.amplitude_spread <= th.periodic_spread)
    c.prey = Regime::Periodic;
  else if (decreasing) c.prey = Regime::Decay;
  else if (increasing) c.prey = Regime::Growing;
  else c.prey = Regime::Irregular;
  return c;
}

namespace {

double reaction_rate_bound(const ModelParams& p) {
  const SteadyState s = steady_state(p);
  const LinearizationCoeffs k = linearization_coeffs(p, s);
  const auto& b = k.beta;
  const auto& g = k.gamma;
  const double rate = std::max(std::abs(b[0]) + std::abs(b[1]) + std::abs(b[2]), std::abs(g[0]) + std::abs(g[1])) +
                      p.r0 + p.d + p.r2;
  return 0.1 / rate;
}

}  // namespace

void check_cfl(const ModelParams& p, const SimConfig& cfg, double dx) {
  const double courant = std::max(std::abs(p.q1), std::abs(p.q2())) * cfg.dt / dx;
  if (cfg.advection && courant > 1.0) {
    std::ostringstream msg;
    msg << "advection Courant number " << courant << " exceeds 1 (dt must be <= "
        << dx / std::max(std::abs(p.q1), std::abs(p.q2())) << ")";
    throw Error(ErrorCode::CflViolation, msg.str());
  }
  if (cfg.reaction) {
    const double bound = reaction_rate_bound(p);
    if (cfg.dt > bound) {
      std::ostringstream msg;
      msg << "dt = " << cfg.dt << " exceeds the reaction bound " << bound;
      throw Error(ErrorCode::CflViolation, msg.str());
    }
  }
}

Simulator::Simulator(const ModelParams& p, const SimConfig& cfg) : p_(p), cfg_(cfg), grid_(cfg.nx, p.length()) {
  p_.validate();
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (cfg.history_stride < 1) throw Error(ErrorCode::InvalidArgument, "history_stride must be >= 1");
  if (cfg.theta < 0.0 || cfg.theta > 1.0) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, 1]");
  check_cfl(p_, cfg_, grid_.dx);
  steady_ = steady_state(p_);
  opu_ = build_operator(p_.d1, cfg_.advection ? p_.q1 : 0.0);
  opv_ = build_operator(p_.d2(), cfg_.advection ? p_.q2() : 0.0);
  const auto n = static_cast<std::size_t>(grid_.nx);
  u_.assign(n, steady_.u);
  v_.assign(n, steady_.v);
  lag_.resize(n);
  ru_.resize(n);
  rv_.resize(n);
  build_initial(cfg_.amplitude);
}

Simulator::Tridiag Simulator::build_operator(double D, double q) const {
  const int n = grid_.nx;
  const double dx = grid_.dx;
  Tridiag T;
  T.r = D * cfg_.dt / (dx * dx);
  T.lo.assign(n, 1.0);
  T.di.assign(n, -2.0);
  T.up.assign(n, 1.0);
  T.lo[0] = 0.0;
  T.up[n - 1] = 0.0;
  T.up[0] = 2.0;
  if (p_.boundary == Boundary::FF) {
    T.lo[n - 1] = 2.0;
  } else {
    // ghost u_{-1} = u_1 - 2 dx (q/D) u_0 from D u_x - q u = 0
    T.di[0] = -2.0 - 2.0 * dx * q / D;
    T.lo[n - 1] = 0.0;
    T.di[n - 1] = 0.0;
  }
  // I - theta r A, factored once
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = -cfg_.theta * T.r * T.lo[i];
    b[i] = 1.0 - cfg_.theta * T.r * T.di[i];
    c[i] = -cfg_.theta * T.r * T.up[i];
  }
  T.cprime.resize(n);
  T.denom.resize(n);
  T.denom[0] = b[0];
  T.cprime[0] = c[0] / b[0];
  for (int i = 1; i < n; ++i) {
    T.denom[i] = b[i] - a[i] * T.cprime[i - 1];
    T.cprime[i] = c[i] / T.denom[i];
  }
  return T;
}

void Simulator::apply_explicit(const Tridiag& T, const std::vector<double>& w, std::vector<double>& out) const {
  const int n = grid_.nx;
  const double s = (1.0 - cfg_.theta) * T.r;
  out[0] = w[0] + s * (T.di[0] * w[0] + T.up[0] * w[1]);
  for (int i = 1; i < n - 1; ++i) out[i] = w[i] + s * (T.lo[i] * w[i - 1] + T.di[i] * w[i] + T.up[i] * w[i + 1]);
  out[n - 1] = w[n - 1] + s * (T.lo[n - 1] * w[n - 2] + T.di[n - 1] * w[n - 1]);
}

void Simulator::solve(const Tridiag& T, std::vector<double>& rhs) const {
  const int n = grid_.nx;
  const double th = cfg_.theta * T.r;
  rhs[0] /= T.denom[0];
  for (int i = 1; i < n; ++i) rhs[i] = (rhs[i] + th * T.lo[i] * rhs[i - 1]) / T.denom[i];
  for (int i = n - 2; i >= 0; --i) rhs[i] -= T.cprime[i] * rhs[i + 1];
}

double Simulator::upwind(const std::vector<double>& w, int i, double q, double D) const {
  const int n = grid_.nx;
  const double dx = grid_.dx;
  if (q >= 0.0) {
    double left;
    if (i > 0) left = w[i - 1];
    else left = p_.boundary == Boundary::FF ? w[1] : w[1] - 2.0 * dx * q / D * w[0];
    return -q * (w[i] - left) / dx;
  }
  const double right = i < n - 1 ? w[i + 1] : w[n - 2];
  return -q * (right - w[i]) / dx;
}

void Simulator::build_initial(double amplitude) {
  const int n = grid_.nx;
  for (int i = 0; i < n; ++i) {
    u_[i] = steady_.u + amplitude * std::cos(grid_.x[i]);
    v_[i] = steady_.v + amplitude * std::cos(grid_.x[i]);
  }
  if (p_.boundary == Boundary::CFD) {
    u_[n - 1] = 0.0;
    v_[n - 1] = 0.0;
  }
  set_fields(u_, v_);
}

void Simulator::set_fields(std::vector<double> u, std::vector<double> v) {
  if (u.size() != u_.size() || v.size() != v_.size()) throw Error(ErrorCode::InvalidArgument, "field size mismatch");
  u_ = std::move(u);
  v_ = std::move(v);
  k_ = 0;
  clips_ = 0;
  history_.emplace(u_, cfg_.history_stride * cfg_.dt, p_.tau);
  history_->push(u_);
}

void Simulator::step() {
  const int n = grid_.nx;
  const double t = time();
  if (cfg_.reaction) history_->at(t - p_.tau, u_, t, lag_);

  apply_explicit(opu_, u_, ru_);
  apply_explicit(opv_, v_, rv_);
  const double q1 = cfg_.advection ? p_.q1 : 0.0;
  const double q2 = cfg_.advection ? p_.q2() : 0.0;
  const double dt = cfg_.dt;
  for (int i = 0; i < n; ++i) {
    double fu = 0.0;
    double fv = 0.0;
    if (cfg_.reaction) {
      const auto r = reaction(p_, u_[i], v_[i], lag_[i]);
      fu = r[0];
      fv = r[1];
    }
    if (q1 != 0.0) fu += upwind(u_, i, q1, p_.d1);
    if (q2 != 0.0) fv += upwind(v_, i, q2, p_.d2());
    ru_[i] += dt * fu;
    rv_[i] += dt * fv;
  }
  if (p_.boundary == Boundary::CFD) {
    ru_[n - 1] = 0.0;
    rv_[n - 1] = 0.0;
  }
  solve(opu_, ru_);
  solve(opv_, rv_);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(ru_[i]) || !std::isfinite(rv_[i])) {
      std::ostringstream msg;
      msg << "non-finite field at node " << i << ", t = " << t + dt;
      throw Error(ErrorCode::NonFiniteField, msg.str());
    }
    for (double* w : {&ru_[i], &rv_[i]}) {
      if (*w < 0.0) {
        if (*w < -1e-10) ++clips_;
        *w = 0.0;
      }
    }
  }
  u_.swap(ru_);
  v_.swap(rv_);
  ++k_;
  if (k_ % cfg_.history_stride == 0) history_->push(u_);
}

Diagnostics Simulator::diagnostics() const {
  Diagnostics d;
  const int n = grid_.nx;
  d.t = time();
  d.u_mid = u_[n / 2];
  d.v_mid = v_[n / 2];
  double su = 0.0;
  double sv = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    su += w * u_[i] * u_[i];
    sv += w * v_[i] * v_[i];
  }
  d.l2u = std::sqrt(su * grid_.dx);
  d.l2v = std::sqrt(sv * grid_.dx);
  const auto [umin, umax] = std::minmax_element(u_.begin(), u_.end());
  const auto [vmin, vmax] = std::minmax_element(v_.begin(), v_.end());
  d.min_u = *umin;
  d.max_u = *umax;
  d.min_v = *vmin;
  d.max_v = *vmax;
  return d;
}

SimResult run(const ModelParams& p, const SimConfig& cfg) {
  Simulator sim(p, cfg);
  SimResult r;
  r.grid = sim.grid();
  r.steps = std::llround(cfg.t_end / cfg.dt);
  r.cfl_advection = std::max(std::abs(p.q1), std::abs(p.q2())) * cfg.dt / sim.grid().dx;
  r.reaction_dt_bound = reaction_rate_bound(p);
  const int trace_stride = std::max(1, cfg.trace_stride);
  r.trace.reserve(static_cast<std::size_t>(r.steps / trace_stride + 2));
  auto snapshot = [&] { r.snapshots.push_back({sim.time(), sim.u(), sim.v(), sim.diagnostics()}); };
  r.trace.push_back(sim.diagnostics());
  if (cfg.snapshot_stride > 0) snapshot();
  for (std::int64_t k = 1; k <= r.steps; ++k) {
    sim.step();
    if (k % trace_stride == 0) r.trace.push_back(sim.diagnostics());
    if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) snapshot();
  }
  if (r.snapshots.empty() || r.snapshots.back().t != sim.time()) snapshot();
  r.clip_count = sim.clip_count();
  r.classification = classify_trace(r.trace, r.snapshots.back().diag.max_v);
  return r;
}

const char* to_string(OrbitVerdict v) noexcept {
  switch (v) {
    case OrbitVerdict::StableOrbit: return "stable";
    case OrbitVerdict::UnstableOrbit: return "unstable";
    case OrbitVerdict::NoOrbit: return "no orbit";
  }
  return "no orbit";
}

namespace {

struct Settled {
  double amplitude = 0.0;
  double drift = 0.0;
};

Settled settled_amplitude(const SimResult& r) {
  std::vector<double> y;
  const std::size_t start = r.trace.size() / 2;
  for (std::size_t i = start; i < r.trace.size(); ++i) y.push_back(r.trace[i].u_mid);
  const std::vector<double> amps = peak_amplitudes(y);
  Settled s;
  if (amps.size() < 10) return s;
  const auto mean = [](auto b, auto e) { return std::accumulate(b, e, 0.0) / static_cast<double>(e - b); };
  const double last = mean(amps.end() - 5, amps.end());
  const double before = mean(amps.end() - 10, amps.end() - 5);
  s.amplitude = last;
  s.drift = std::abs(last - before) / last;
  return s;
}

}  // namespace

ProbeResult orbit_stability_probe(const ModelParams& p, double tau_offset, const SimConfig& base,
                                  const ProbeOptions& opt) {
  if (tau_offset == 0.0 || std::abs(tau_offset) > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "tau_offset must satisfy 0 < |tau_offset| <= 1");
  }
  ProbeResult out;
  double tau_c;
  if (opt.tau_c) {
    tau_c = *opt.tau_c;
  } else {
    const auto hp = first_hopf_point(analyze(p, 8, 0));
    if (!hp) throw Error(ErrorCode::NoConvergence, "no Hopf point to probe");
    tau_c = hp->tau;
  }
  out.tau = tau_c + tau_offset;

  std::array<SimResult, 2> runs;
  const std::array<double, 2> amps{0.01, 0.05};
  detail::parallel_for(2, [&](std::size_t i) {
    ModelParams q = p;
    q.tau = out.tau;
    SimConfig cfg = base;
    cfg.amplitude = amps[i];
    cfg.t_end = opt.t_end;
    cfg.snapshot_stride = 0;
    runs[i] = run(q, cfg);
  });
  out.small = runs[0].classification;
  out.large = runs[1].classification;

  const bool decay_small = out.small.prey == Regime::Decay;
  const bool decay_large = out.large.prey == Regime::Decay;
  if (decay_small && decay_large) {
    out.verdict = OrbitVerdict::NoOrbit;
    return out;
  }
  if (decay_small != decay_large) {
    out.verdict = OrbitVerdict::UnstableOrbit;
    return out;
  }
  const Settled s = settled_amplitude(runs[0]);
  const Settled l = settled_amplitude(runs[1]);
  out.amplitude_small = s.amplitude;
  out.amplitude_large = l.amplitude;
  if (s.amplitude == 0.0 || l.amplitude == 0.0 || s.drift > opt.settle || l.drift > opt.settle) {
    std::ostringstream msg;
    msg << "oscillation amplitudes still drifting at t_end = " << opt.t_end << " (" << s.drift << ", " << l.drift
        << ")";
    throw Error(ErrorCode::Inconclusive, msg.str());
  }
  const double rel = std::abs(s.amplitude - l.amplitude) / std::max(s.amplitude, l.amplitude);
  out.verdict = rel <= opt.agreement ? OrbitVerdict::StableOrbit : OrbitVerdict::UnstableOrbit;
  return out;
}

}  // namespace advhopf
