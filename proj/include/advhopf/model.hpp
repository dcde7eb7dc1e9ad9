#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>

namespace advhopf {

/// Boundary-condition family. CFD: constant-flux (Robin, zero flux constant)
/// upstream at x=0 and homogeneous Dirichlet downstream at x=l*pi.
/// FF: free-flow (Neumann) at both ends.
enum class Boundary { CFD, FF };

enum class ResponseKind { HollingI, HollingII };

const char* to_string(Boundary b) noexcept;
std::optional<Boundary> parse_boundary(const std::string& text);

/// Scalar parameters of the delayed predator-prey system with fear effect
///
///   u_t = d1 u_xx - q1 u_x + u [r0 f(K,v) - d - a u(x,t-tau)] - g(u) v
///   v_t = d2 v_xx - q2 v_x + v (-r2 - m v + c g(u))
///
/// on (0, l*pi) with d2 = eps*d1 and q2 = eps*q1. The functional response is
/// Holling I (g = p0 u) when c1 == 0 and Holling II (g = p0 u / (1 + c1 u))
/// otherwise.
struct ModelParams {
  double r0 = 0.0;   // prey intrinsic birth rate
  double K = 0.0;    // fear level
  double d = 0.0;    // prey death rate
  double a = 0.0;    // prey intraspecific competition
  double r2 = 0.0;   // predator death rate
  double m = 0.0;    // predator competition
  double c = 0.0;    // conversion efficiency
  double p0 = 0.0;   // capture rate
  double c1 = 0.0;   // Holling-II saturation
  double d1 = 0.0;   // prey diffusion
  double q1 = 0.0;   // prey advection speed
  double eps = 1.0;  // predator/prey ratio for diffusion and advection
  double l = 1.0;    // domain is (0, l*pi)
  double tau = 0.0;  // delay
  Boundary boundary = Boundary::CFD;

  double d2() const noexcept { return eps * d1; }
  double q2() const noexcept { return eps * q1; }
  double length() const noexcept { return l * std::numbers::pi; }
  ResponseKind response() const noexcept {
    return c1 == 0.0 ? ResponseKind::HollingI : ResponseKind::HollingII;
  }

  /// Throws Error(InvalidArgument) naming the first offending field.
  void validate() const;

  /// The reference parameter set used throughout the examples and tests:
  /// K=10, d=0.04, a=0.06, p0=0.8, r2=0.5, c=0.4, m=0.1, d1=0.3, eps=8,
  /// l=10, q1=0.001, with r0=0.2 and Holling I.
  static ModelParams reference();

  /// Named scalar access used by parameter sweeps and the scenario parser.
  /// Returns nullptr for unknown names.
  double* field(const std::string& name) noexcept;
  const double* field(const std::string& name) const noexcept;
};

/// f(K,v) = 1/(1+Kv) and its first three v-derivatives.
struct FearEval {
  double f = 1.0;
  double fv = 0.0;
  double fvv = 0.0;
  double fvvv = 0.0;
};

FearEval eval_fear(double K, double v) noexcept;

/// g(u) and its first three derivatives.
struct ResponseEval {
  double g = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
};

ResponseEval eval_response(ResponseKind kind, double p0, double c1, double u) noexcept;

inline ResponseEval eval_response(const ModelParams& p, double u) noexcept {
  return eval_response(p.response(), p.p0, p.c1, u);
}

struct SteadyState {
  double u = 0.0;
  double v = 0.0;
  // Helper scalars of the Holling-I closed form; zero when produced by Newton
  // for a Holling-II model.
  double m0 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
  int iterations = 0;
};

/// Closed-form positive steady state of the Holling-I model.
/// Throws PositivityViolation when A3 >= 0.
SteadyState steady_state_holling1(const ModelParams& p);

/// Damped Newton iteration on the reduced algebraic system
///   r0/(1+Kv) - d - a u - (g(u)/u) v = 0,   -r2 - m v + c g(u) = 0.
/// Throws NonPositiveRoot or NoConvergence.
SteadyState steady_state_newton(const ModelParams& p, std::array<double, 2> guess);

/// Holling I: closed form. Holling II: Newton seeded from the Holling-I
/// closed form with the same parameters (falls back to (1, 0.1) when that
/// does not exist).
SteadyState steady_state(const ModelParams& p);

/// Reaction terms (no transport) at local values u, v and delayed prey u_lag.
std::array<double, 2> reaction(const ModelParams& p, double u, double v, double u_lag) noexcept;

/// Taylor coefficients of the reaction terms about the steady state:
/// beta[0..10] for the prey equation, gamma[0..6] for the predator equation.
struct LinearizationCoeffs {
  std::array<double, 11> beta{};
  std::array<double, 7> gamma{};
};

LinearizationCoeffs linearization_coeffs(const ModelParams& p, const SteadyState& s,
                                         const FearEval& fear, const ResponseEval& response);

LinearizationCoeffs linearization_coeffs(const ModelParams& p, const SteadyState& s);

}  // namespace advhopf
