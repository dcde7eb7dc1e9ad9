#include "advhopf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "advhopf/error.hpp"
#include "parallel.hpp"

namespace advhopf {

using std::numbers::pi;

const char* to_string(Branch b) noexcept { return b == Branch::Plus ? "+" : "-"; }

const char* to_string(CrossingCondition c) noexcept {
  switch (c) {
    case CrossingCondition::S2: return "S2";
    case CrossingCondition::S3: return "S3";
    case CrossingCondition::None: break;
  }
  return "none";
}

ModalChar modal_char(int n, const LinearizationCoeffs& k, double nu, double eps) {
  const auto& b = k.beta;
  const auto& c = k.gamma;
  ModalChar mc;
  mc.n = n;
  mc.nu = nu;
  mc.eps = eps;
  mc.beta2 = b[2];
  mc.gamma1 = c[1];
  mc.M = (eps + 1.0) * nu - b[0] - c[1];
  mc.T = (nu - b[0]) * (eps * nu - c[1]) - c[0] * b[1];
  mc.C = mc.T + b[2] * (c[1] - eps * nu);
  mc.D = mc.M * mc.M - 2.0 * mc.T - b[2] * b[2];
  mc.E = mc.T - b[2] * (c[1] - eps * nu);
  return mc;
}

cplx characteristic(const ModalChar& mc, cplx lambda, double tau) {
  return lambda * lambda + mc.M * lambda + mc.T +
         mc.beta2 * std::exp(-lambda * tau) * (-lambda - mc.eps * mc.nu + mc.gamma1);
}

namespace {

cplx characteristic_dlambda(const ModalChar& mc, cplx lambda, double tau) {
  const cplx e = mc.beta2 * std::exp(-lambda * tau);
  return 2.0 * lambda + mc.M - e - tau * e * (-lambda - mc.eps * mc.nu + mc.gamma1);
}

cplx characteristic_dtau(const ModalChar& mc, cplx lambda, double tau) {
  const cplx e = mc.beta2 * std::exp(-lambda * tau);
  return -lambda * e * (-lambda - mc.eps * mc.nu + mc.gamma1);
}

}  // namespace

S1Check check_s1(std::span<const ModalChar> chars, double beta2) {
  for (const auto& mc : chars) {
    if (!(beta2 - mc.M < 0.0 && mc.C > 0.0)) return {false, mc.n};
  }
  return {true, std::nullopt};
}

OmegaRoots omega_roots(const ModalChar& mc) {
  OmegaRoots r;
  const double disc = mc.discriminant();
  if (mc.E < 0.0) {
    r.condition = CrossingCondition::S2;
    if (disc >= 0.0) {
      const double z = 0.5 * (-mc.D + std::sqrt(disc));
      if (z > 0.0) {
        r.z_plus = z;
        r.omega_plus = std::sqrt(z);
      }
    }
  } else if (mc.D < 0.0 && mc.E > 0.0 && disc > 0.0) {
    r.condition = CrossingCondition::S3;
    const double s = std::sqrt(disc);
    const double zp = 0.5 * (-mc.D + s);
    const double zm = 0.5 * (-mc.D - s);
    if (zp > 0.0) {
      r.z_plus = zp;
      r.omega_plus = std::sqrt(zp);
    }
    if (zm > 0.0) {
      r.z_minus = zm;
      r.omega_minus = std::sqrt(zm);
    }
  }
  return r;
}

std::vector<HopfPoint> tau_ladder(int n, Branch branch, int j_max, const ModalChar& mc, double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_ladder needs omega > 0");
  const double g = mc.g();
  const double w2 = omega * omega;
  const double den = mc.beta2 * (g * g + w2);
  const double cos_v = ((w2 - mc.T) * g + mc.M * w2) / den;
  const double sin_v = (mc.M * omega * g - omega * (w2 - mc.T)) / den;
  const double unit = cos_v * cos_v + sin_v * sin_v;
  if (std::abs(unit - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "C^2 + S^2 = " << unit << " at mode " << n;
    throw Error(ErrorCode::InconsistentTrig, msg.str());
  }
  double theta = std::acos(std::clamp(cos_v, -1.0, 1.0));
  if (sin_v < 0.0) theta = 2.0 * pi - theta;
  std::vector<HopfPoint> out;
  out.reserve(j_max + 1);
  for (int j = 0; j <= j_max; ++j) {
    HopfPoint hp;
    hp.n = n;
    hp.branch = branch;
    hp.j = j;
    hp.omega = omega;
    hp.tau = (theta + 2.0 * j * pi) / omega;
    hp.cos_value = cos_v;
    hp.sin_value = sin_v;
    out.push_back(hp);
  }
  return out;
}

Transversality transversality(const ModalChar& mc, Branch branch, double omega, double tau) {
  const double disc = mc.discriminant();
  if (disc <= 1e-14) {
    std::ostringstream msg;
    msg << "double root of the z-quadratic at mode " << mc.n << " (D^2-4CE = " << disc << ")";
    throw Error(ErrorCode::DegenerateCrossing, msg.str());
  }
  const cplx lambda(0.0, omega);
  Transversality t;
  t.dlambda_dtau = -characteristic_dtau(mc, lambda, tau) / characteristic_dlambda(mc, lambda, tau);
  t.re_inverse = (1.0 / t.dlambda_dtau).real();
  const double g = mc.g();
  const double sgn = branch == Branch::Plus ? 1.0 : -1.0;
  t.re_inverse_closed = sgn * std::sqrt(disc) / (mc.beta2 * mc.beta2 * (omega * omega + g * g));
  t.sign = branch == Branch::Plus ? 1 : -1;
  return t;
}

cplx track_root(const ModalChar& mc, cplx seed, double tau) {
  cplx lambda = seed;
  for (int it = 0; it < 60; ++it) {
    const cplx step = characteristic(mc, lambda, tau) / characteristic_dlambda(mc, lambda, tau);
    lambda -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(lambda))) return lambda;
  }
  if (std::abs(characteristic(mc, lambda, tau)) < 1e-13) return lambda;
  throw Error(ErrorCode::NoConvergence, "characteristic root tracking did not converge");
}

cplx dlambda_dtau_numeric(const ModalChar& mc, double omega, double tau, double h) {
  const cplx seed(0.0, omega);
  const cplx up = track_root(mc, seed, tau + h);
  const cplx down = track_root(mc, seed, tau - h);
  return (up - down) / (2.0 * h);
}

LinearAnalysis analyze(const ModelParams& p, int n_modes, int j_max) {
  p.validate();
  LinearAnalysis a;
  a.steady = steady_state(p);
  a.coeffs = linearization_coeffs(p, a.steady);
  a.modes = modes_for(n_modes, p);
  a.chars.reserve(a.modes.size());
  for (const auto& m : a.modes) a.chars.push_back(modal_char(m.n, a.coeffs, m.nu, p.eps));
  a.s1 = check_s1(a.chars, a.coeffs.beta[2]);
  for (const auto& mc : a.chars) {
    const OmegaRoots roots = omega_roots(mc);
    if (roots.omega_plus) {
      auto ladder = tau_ladder(mc.n, Branch::Plus, j_max, mc, *roots.omega_plus);
      a.points.insert(a.points.end(), ladder.begin(), ladder.end());
    }
    if (roots.omega_minus) {
      auto ladder = tau_ladder(mc.n, Branch::Minus, j_max, mc, *roots.omega_minus);
      a.points.insert(a.points.end(), ladder.begin(), ladder.end());
    }
  }
  std::stable_sort(a.points.begin(), a.points.end(), [](const HopfPoint& x, const HopfPoint& y) {
    if (x.tau != y.tau) return x.tau < y.tau;
    return x.branch == Branch::Plus && y.branch == Branch::Minus;
  });
  return a;
}

std::optional<HopfPoint> first_hopf_point(const LinearAnalysis& a) {
  std::optional<HopfPoint> best;
  for (const auto& hp : a.points) {
    if (hp.j == 0 && (!best || hp.tau < best->tau)) best = hp;
  }
  return best;
}

StabilityVerdict stability_windows(const LinearAnalysis& a, double tau_max) {
  if (!a.s1.holds) {
    std::ostringstream msg;
    msg << "S1 fails at mode " << a.s1.witness.value_or(-1) << "; the delay-free steady state is not stable";
    throw Error(ErrorCode::S1Violation, msg.str());
  }
  StabilityVerdict v;
  for (const auto& hp : a.points) {
    if (hp.tau <= tau_max) v.points.push_back(hp);
  }
  const int last_mode = a.modes.empty() ? -1 : a.modes.back().n;
  int count = 0;
  double lo = 0.0;
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    const HopfPoint& hp = v.points[i];
    if (hp.n == last_mode) v.last_mode_contributes = true;
    if (i > 0 && std::abs(hp.tau - v.points[i - 1].tau) <= 1e-10) {
      std::ostringstream msg;
      msg << "coincident crossings at tau=" << hp.tau;
      v.flags.push_back(msg.str());
    }
    if (hp.branch == Branch::Plus) {
      if (count == 0) v.stable.push_back({lo, hp.tau, false});
      ++count;
    } else {
      --count;
      if (count == 0) lo = hp.tau;
      if (count < 0) {
        std::ostringstream msg;
        msg << "negative crossing count at tau=" << hp.tau;
        v.flags.push_back(msg.str());
      }
    }
  }
  if (count == 0) v.stable.push_back({lo, tau_max, true});
  return v;
}

StabilityVerdict stability_windows(const ModelParams& p, const StabilityOptions& opt) {
  return stability_windows(analyze(p, opt.n_modes, opt.j_max), opt.tau_max);
}

std::vector<SweepRow> hopf_curve_sweep(const std::string& param_name, double lo, double hi, int steps,
                                       const ModelParams& base, const SweepOptions& opt) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs steps >= 1");
  if (base.field(param_name) == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + param_name + "'");
  }
  std::vector<SweepRow> rows(steps);
  detail::parallel_for(
      static_cast<std::size_t>(steps),
      [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.param = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        ModelParams p = base;
        *p.field(param_name) = row.param;
        try {
          LinearAnalysis a = analyze(p, opt.n_modes, opt.j_max);
          for (const auto& hp : a.points) {
            if (hp.tau <= opt.tau_max) row.points.push_back(hp);
          }
          row.critical = first_hopf_point(a);
          if (!row.critical) row.error = "no crossing";
        } catch (const Error& e) {
          row.error = e.what();
          row.points.clear();
        }
      },
      opt.parallel);
  return rows;
}

}  // namespace advhopf
