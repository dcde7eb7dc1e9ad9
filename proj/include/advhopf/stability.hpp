#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advhopf/model.hpp"
#include "advhopf/spectral.hpp"

namespace advhopf {

using cplx = std::complex<double>;

/// Per-mode coefficients of the characteristic equation
///   lambda^2 + M lambda + T + beta2 e^{-lambda tau} (-lambda - eps nu + gamma1) = 0
/// and of the quadratic z^2 + D z + C E = 0 in z = omega^2.
struct ModalChar {
  int n = 0;
  double nu = 0.0;
  double eps = 1.0;
  double beta2 = 0.0;
  double gamma1 = 0.0;
  double M = 0.0;
  double T = 0.0;
  double C = 0.0;
  double D = 0.0;
  double E = 0.0;

  /// gamma1 - eps*nu, the recurring predator self-term.
  double g() const noexcept { return gamma1 - eps * nu; }
  double discriminant() const noexcept { return D * D - 4.0 * C * E; }
};

ModalChar modal_char(int n, const LinearizationCoeffs& k, double nu, double eps);

/// Left side of the characteristic equation.
cplx characteristic(const ModalChar& mc, cplx lambda, double tau);

struct S1Check {
  bool holds = true;
  std::optional<int> witness;  // first violating mode index
};

/// beta2 - M_n < 0 and C_n > 0 for every supplied mode.
S1Check check_s1(std::span<const ModalChar> chars, double beta2);

enum class Branch { Plus, Minus };
enum class CrossingCondition { None, S2, S3 };

const char* to_string(Branch b) noexcept;
const char* to_string(CrossingCondition c) noexcept;

struct OmegaRoots {
  CrossingCondition condition = CrossingCondition::None;
  std::optional<double> z_plus;
  std::optional<double> z_minus;
  std::optional<double> omega_plus;
  std::optional<double> omega_minus;
};

OmegaRoots omega_roots(const ModalChar& mc);

struct HopfPoint {
  int n = 0;
  Branch branch = Branch::Plus;
  int j = 0;
  double omega = 0.0;
  double tau = 0.0;
  double cos_value = 0.0;  // C_n(omega)
  double sin_value = 0.0;  // S_n(omega)
};

/// Critical-delay ladder j = 0..j_max for one branch. Throws InconsistentTrig
/// when C_n(omega)^2 + S_n(omega)^2 deviates from 1 by more than 1e-8.
std::vector<HopfPoint> tau_ladder(int n, Branch branch, int j_max, const ModalChar& mc, double omega);

struct Transversality {
  int sign = 0;
  cplx dlambda_dtau;          // implicit differentiation of the characteristic equation
  double re_inverse = 0.0;    // Re (d lambda / d tau)^{-1} from the implicit derivative
  double re_inverse_closed = 0.0;  // +-sqrt(D^2 - 4CE) / (beta2^2 [omega^2 + (gamma1 - eps nu)^2])
};

/// Throws DegenerateCrossing when D^2 - 4CE <= 1e-14.
Transversality transversality(const ModalChar& mc, Branch branch, double omega, double tau);

/// Newton iteration for the characteristic root near `seed` at delay `tau`.
cplx track_root(const ModalChar& mc, cplx seed, double tau);

/// d lambda / d tau by central differences of tracked roots at tau +- h.
cplx dlambda_dtau_numeric(const ModalChar& mc, double omega, double tau, double h = 1e-4);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool truncated = false;  // hi was cut at tau_max
};

struct StabilityVerdict {
  std::vector<Interval> stable;
  std::vector<HopfPoint> points;  // sorted by tau, all <= tau_max
  bool last_mode_contributes = false;
  std::vector<std::string> flags;
};

struct StabilityOptions {
  int n_modes = 8;
  int j_max = 6;
  double tau_max = 60.0;
};

/// Everything the linear analysis derives from a parameter set.
struct LinearAnalysis {
  SteadyState steady;
  LinearizationCoeffs coeffs;
  std::vector<Mode> modes;
  std::vector<ModalChar> chars;
  S1Check s1;
  std::vector<HopfPoint> points;  // all ladders for n <= n_modes, j <= j_max, sorted by tau
};

LinearAnalysis analyze(const ModelParams& p, int n_modes, int j_max);

/// Smallest critical delay over all modes and branches (the j = 0 rungs).
std::optional<HopfPoint> first_hopf_point(const LinearAnalysis& a);

/// Stable delay intervals by crossing-count bookkeeping. Throws S1Violation
/// when the delay-free state is not stable.
StabilityVerdict stability_windows(const ModelParams& p, const StabilityOptions& opt = {});
StabilityVerdict stability_windows(const LinearAnalysis& a, double tau_max);

struct SweepRow {
  double param = 0.0;
  std::vector<HopfPoint> points;
  std::optional<HopfPoint> critical;
  std::string error;  // non-empty for a gap
};

struct SweepOptions {
  int n_modes = 8;
  int j_max = 0;
  double tau_max = std::numeric_limits<double>::infinity();
  bool parallel = true;
};

/// Evaluates `steps` equally spaced values of `param_name` on [lo, hi]
/// (steps == 1 evaluates lo). Rows come back in ascending parameter order.
std::vector<SweepRow> hopf_curve_sweep(const std::string& param_name, double lo, double hi, int steps,
                                       const ModelParams& base, const SweepOptions& opt = {});

}  // namespace advhopf
