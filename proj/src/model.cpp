#include "advhopf/model.hpp"

#include <cmath>
#include <sstream>

#include "advhopf/error.hpp"

namespace advhopf {

const char* to_string(Boundary b) noexcept { return b == Boundary::CFD ? "CFD" : "FF"; }

std::optional<Boundary> parse_boundary(const std::string& text) {
  if (text == "CFD" || text == "cfd" || text == "CF/D" || text == "cf/d") return Boundary::CFD;
  if (text == "FF" || text == "ff") return Boundary::FF;
  return std::nullopt;
}

void ModelParams::validate() const {
  auto positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive and finite");
    }
  };
  positive(r0, "r0");
  positive(K, "K");
  positive(d, "d");
  positive(a, "a");
  positive(r2, "r2");
  positive(m, "m");
  positive(c, "c");
  positive(p0, "p0");
  positive(d1, "d1");
  positive(l, "l");
  positive(eps, "eps");
  if (!(c1 >= 0.0) || !std::isfinite(c1)) throw Error(ErrorCode::InvalidArgument, "c1 must be >= 0");
  if (!(q1 >= 0.0) || !std::isfinite(q1)) throw Error(ErrorCode::InvalidArgument, "q1 must be >= 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");
}

ModelParams ModelParams::reference() {
  ModelParams p;
  p.r0 = 0.2;
  p.K = 10.0;
  p.d = 0.04;
  p.a = 0.06;
  p.p0 = 0.8;
  p.r2 = 0.5;
  p.c = 0.4;
  p.m = 0.1;
  p.c1 = 0.0;
  p.d1 = 0.3;
  p.eps = 8.0;
  p.l = 10.0;
  p.q1 = 0.001;
  p.tau = 0.0;
  p.boundary = Boundary::CFD;
  return p;
}

double* ModelParams::field(const std::string& name) noexcept {
  if (name == "r0") return &r0;
  if (name == "K") return &K;
  if (name == "d") return &d;
  if (name == "a") return &a;
  if (name == "r2") return &r2;
  if (name == "m") return &m;
  if (name == "c") return &c;
  if (name == "p0") return &p0;
  if (name == "c1") return &c1;
  if (name == "d1") return &d1;
  if (name == "q1") return &q1;
  if (name == "eps") return &eps;
  if (name == "l") return &l;
  if (name == "tau") return &tau;
  return nullptr;
}

const double* ModelParams::field(const std::string& name) const noexcept {
  return const_cast<ModelParams*>(this)->field(name);
}

FearEval eval_fear(double K, double v) noexcept {
  const double w = 1.0 + K * v;
  const double w2 = w * w;
  return {1.0 / w, -K / w2, 2.0 * K * K / (w2 * w), -6.0 * K * K * K / (w2 * w2)};
}

ResponseEval eval_response(ResponseKind kind, double p0, double c1, double u) noexcept {
  if (kind == ResponseKind::HollingI) return {p0 * u, p0, 0.0, 0.0};
  const double s = 1.0 + c1 * u;
  const double s2 = s * s;
  return {p0 * u / s, p0 / s2, -2.0 * p0 * c1 / (s2 * s), 6.0 * p0 * c1 * c1 / (s2 * s2)};
}

SteadyState steady_state_holling1(const ModelParams& p) {
  SteadyState s;
  s.m0 = p.a / (p.c * p.p0);
  s.A1 = p.K * (p.p0 + p.m * s.m0);
  s.A2 = p.p0 + p.K * s.m0 * p.r2 + p.m * s.m0 + p.d * p.K;
  s.A3 = s.m0 * p.r2 + p.d - p.r0;
  if (!(s.A3 < 0.0)) {
    std::ostringstream msg;
    msg << "A3 = m0*r2 + d - r0 = " << s.A3 << " is not negative; no positive steady state";
    throw Error(ErrorCode::PositivityViolation, msg.str());
  }
  s.v = (-s.A2 + std::sqrt(s.A2 * s.A2 - 4.0 * s.A1 * s.A3)) / (2.0 * s.A1);
  s.u = (p.r2 + p.m * s.v) / (p.c * p.p0);
  return s;
}

namespace {

// Reduced system with g(u)/u evaluated without dividing by u.
std::array<double, 2> reduced_residual(const ModelParams& p, double u, double v) {
  const double per_capita = p.p0 / (1.0 + p.c1 * u);
  const double g = per_capita * u;
  return {p.r0 / (1.0 + p.K * v) - p.d - p.a * u - per_capita * v, -p.r2 - p.m * v + p.c * g};
}

}  // namespace

SteadyState steady_state_newton(const ModelParams& p, std::array<double, 2> guess) {
  double u = guess[0];
  double v = guess[1];
  if (!(u > 0.0) || !(v > 0.0)) {
    throw Error(ErrorCode::NonPositiveRoot, "initial guess must be componentwise positive");
  }
  constexpr int kMaxIterations = 100;
  constexpr int kMaxHalvings = 30;
  constexpr double kTol = 1e-12;

  for (int it = 1; it <= kMaxIterations; ++it) {
    const auto F = reduced_residual(p, u, v);
    const double s = 1.0 + p.c1 * u;
    const double per_capita = p.p0 / s;
    const double dper_capita = -p.p0 * p.c1 / (s * s);
    const double w = 1.0 + p.K * v;
    const double j11 = -p.a - dper_capita * v;
    const double j12 = -p.r0 * p.K / (w * w) - per_capita;
    const double j21 = p.c * p.p0 / (s * s);
    const double j22 = -p.m;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) {
      throw Error(ErrorCode::NoConvergence, "singular Jacobian in steady-state Newton iteration");
    }
    const double du = -(j22 * F[0] - j12 * F[1]) / det;
    const double dv = -(-j21 * F[0] + j11 * F[1]) / det;

    double lambda = 1.0;
    int halvings = 0;
    while (!(u + lambda * du > 0.0 && v + lambda * dv > 0.0)) {
      if (++halvings > kMaxHalvings) {
        throw Error(ErrorCode::NonPositiveRoot, "Newton iterate left the positive quadrant");
      }
      lambda *= 0.5;
    }
    u += lambda * du;
    v += lambda * dv;

    const auto Fn = reduced_residual(p, u, v);
    const double step = std::max(std::abs(lambda * du), std::abs(lambda * dv));
    const double res = std::max(std::abs(Fn[0]), std::abs(Fn[1]));
    if (step < kTol && res < kTol) {
      SteadyState out;
      out.u = u;
      out.v = v;
      out.iterations = it;
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence, "steady-state Newton iteration did not converge in 100 iterations");
}

SteadyState steady_state(const ModelParams& p) {
  if (p.response() == ResponseKind::HollingI) return steady_state_holling1(p);
  std::array<double, 2> guess{1.0, 0.1};
  try {
    ModelParams linear = p;
    linear.c1 = 0.0;
    const SteadyState seed = steady_state_holling1(linear);
    guess = {seed.u, seed.v};
  } catch (const Error&) {
  }
  return steady_state_newton(p, guess);
}

std::array<double, 2> reaction(const ModelParams& p, double u, double v, double u_lag) noexcept {
  const double g = eval_response(p, u).g;
  return {u * (p.r0 / (1.0 + p.K * v) - p.d - p.a * u_lag) - g * v, v * (-p.r2 - p.m * v + p.c * g)};
}

LinearizationCoeffs linearization_coeffs(const ModelParams& p, const SteadyState& s,
                                         const FearEval& f, const ResponseEval& g) {
  const double u = s.u;
  const double v = s.v;
  LinearizationCoeffs k;
  auto& b = k.beta;
  auto& c = k.gamma;
  b[0] = v * (g.g / u - g.g1);
  b[1] = p.r0 * u * f.fv - g.g;
  b[2] = -p.a * u;
  b[3] = -0.5 * g.g2 * v;
  b[4] = p.r0 * f.fv - g.g1;
  b[5] = 0.5 * p.r0 * u * f.fvv;
  b[6] = -p.a;
  b[7] = -g.g3 * v / 6.0;
  b[8] = p.r0 * f.fvvv * u / 6.0;
  b[9] = -0.5 * g.g2;
  b[10] = 0.5 * p.r0 * f.fvv;
  c[0] = p.c * v * g.g1;
  c[1] = -p.m * v;
  c[2] = 0.5 * p.c * g.g2 * v;
  c[3] = p.c * g.g1;
  c[4] = -p.m;
  c[5] = p.c * g.g3 * v / 6.0;
  c[6] = 0.5 * p.c * g.g2;
  return k;
}

LinearizationCoeffs linearization_coeffs(const ModelParams& p, const SteadyState& s) {
  return linearization_coeffs(p, s, eval_fear(p.K, s.v), eval_response(p, s.u));
}

}  // namespace advhopf
