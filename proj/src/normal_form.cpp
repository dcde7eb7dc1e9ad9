#include "advhopf/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "advhopf/error.hpp"

namespace advhopf {

namespace {

constexpr cplx I{0.0, 1.0};

cplx dot(const EigenvectorData& ev, const Vec2c& v) { return v[0] + ev.p2_star * v[1]; }

using Mat2c = std::array<std::array<cplx, 2>, 2>;

Vec2c solve2(const Mat2c& A, const Vec2c& b, double& residual) {
  const cplx det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (std::abs(det) < 1e-12) {
    std::ostringstream msg;
    msg << "|det| = " << std::abs(det) << " (resonant mode)";
    throw Error(ErrorCode::SingularL, msg.str());
  }
  Vec2c x{(A[1][1] * b[0] - A[0][1] * b[1]) / det, (A[0][0] * b[1] - A[1][0] * b[0]) / det};
  const cplx r0 = A[0][0] * x[0] + A[0][1] * x[1] - b[0];
  const cplx r1 = A[1][0] * x[0] + A[1][1] * x[1] - b[1];
  const double scale = std::max({1.0, std::abs(b[0]), std::abs(b[1])});
  residual = std::max(std::abs(r0), std::abs(r1)) / scale;
  return x;
}

const Mode& find_mode(std::span<const Mode> modes, int n) {
  for (const auto& m : modes) {
    if (m.n == n) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "critical mode is not part of the mode list");
}

}  // namespace

const char* to_string(Direction d) noexcept { return d == Direction::Forward ? "forward" : "backward"; }
const char* to_string(OrbitStability s) noexcept { return s == OrbitStability::Stable ? "stable" : "unstable"; }

EigenvectorData eigvec_data(const LinearizationCoeffs& k, const Mode& mode, const HopfPoint& hp, double eps) {
  if (mode.n != hp.n) throw Error(ErrorCode::InvalidArgument, "Hopf point does not belong to the supplied mode");
  const auto& b = k.beta;
  const auto& c = k.gamma;
  EigenvectorData ev;
  ev.omega = hp.omega;
  ev.tau_c = hp.tau;
  ev.n0 = hp.n;
  ev.nu = mode.nu;
  const cplx den = I * hp.omega + eps * mode.nu - c[1];
  ev.p1 = c[0] / den;
  ev.p2_star = b[1] / den;
  const cplx norm = 1.0 + ev.p1 * ev.p2_star + b[2] * hp.tau * std::exp(-I * hp.omega * hp.tau);
  if (std::abs(norm) < 1e-12) throw Error(ErrorCode::SingularNormalization, "vanishing center-space pairing");
  ev.Psi = 1.0 / norm;
  return ev;
}

std::array<std::array<cplx, 2>, 2> modal_matrix(const LinearizationCoeffs& k, double nu, double eps, cplx lambda,
                                                 double tau) {
  const auto& b = k.beta;
  const auto& c = k.gamma;
  return {{{lambda + nu - b[0] - b[2] * std::exp(-lambda * tau), -b[1]}, {-c[0], lambda + eps * nu - c[1]}}};
}

QuadraticBrackets quadratic_brackets(const LinearizationCoeffs& k, const EigenvectorData& ev) {
  const auto& b = k.beta;
  const auto& c = k.gamma;
  const cplx p = ev.p1;
  const cplx pc = std::conj(p);
  const cplx e = std::exp(-I * ev.omega * ev.tau_c);
  QuadraticBrackets q;
  q.z2 = {b[3] + b[4] * p + b[5] * p * p + b[6] * e, c[2] + c[3] * p + c[4] * p * p};
  q.zzbar = {2.0 * b[3] + b[4] * (p + pc) + 2.0 * b[5] * p * pc + b[6] * (e + std::conj(e)),
             2.0 * c[2] + c[3] * (p + pc) + 2.0 * c[4] * p * pc};
  q.zbar2 = {b[3] + b[4] * pc + b[5] * pc * pc + b[6] * std::conj(e), c[2] + c[3] * pc + c[4] * pc * pc};
  return q;
}

std::pair<cplx, cplx> cubic_k20_k11(const EigenvectorData& ev, const LinearizationCoeffs& k, double b2bt) {
  const QuadraticBrackets q = quadratic_brackets(k, ev);
  const cplx K20 = 2.0 * ev.tau_c * ev.Psi * dot(ev, q.z2) * b2bt;
  const cplx K11 = ev.tau_c * ev.Psi * dot(ev, q.zzbar) * b2bt;
  return {K20, K11};
}

cplx cubic_k02(const EigenvectorData& ev, const LinearizationCoeffs& k, double b2bt) {
  const QuadraticBrackets q = quadratic_brackets(k, ev);
  return 2.0 * ev.tau_c * ev.Psi * dot(ev, q.zbar2) * b2bt;
}

Vec2c CenterManifoldData::lambda1_at(double x) const {
  Vec2c out{};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double bn = basis[i](x);
    out[0] += lambda1[i][0] * bn;
    out[1] += lambda1[i][1] * bn;
  }
  return out;
}

Vec2c CenterManifoldData::lambda2_at(double x) const {
  Vec2c out{};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double bn = basis[i](x);
    out[0] += lambda2[i][0] * bn;
    out[1] += lambda2[i][1] * bn;
  }
  return out;
}

CenterManifoldData lambda_series(const EigenvectorData& ev, const LinearizationCoeffs& k, const Mode& n0,
                                 std::span<const Mode> modes, double eps) {
  const auto& b = k.beta;
  const auto& c = k.gamma;
  const QuadraticBrackets q = quadratic_brackets(k, ev);
  const double w = ev.omega;
  const double tau = ev.tau_c;
  const cplx e2 = std::exp(-2.0 * I * w * tau);

  CenterManifoldData cm;
  cm.modes.assign(modes.begin(), modes.end());
  cm.basis.reserve(modes.size());
  for (const auto& m : modes) {
    cm.basis.push_back(eigenfunction(m));
    const double coupling = mode_integral(IntegralKind::B2B, n0, &m);
    cm.coupling.push_back(std::abs(coupling) < 1e-14 ? 0.0 : coupling);

    const Mat2c L1{{{2.0 * I * w + m.nu - b[0] - b[2] * e2, -b[1]}, {-c[0], 2.0 * I * w + eps * m.nu - c[1]}}};
    const Mat2c L2{{{m.nu - b[0] - b[2], -b[1]}, {-c[0], eps * m.nu - c[1]}}};
    const double I_n = cm.coupling.back();
    double r1 = 0.0;
    double r2 = 0.0;
    cm.lambda1.push_back(solve2(L1, {2.0 * q.z2[0] * I_n, 2.0 * q.z2[1] * I_n}, r1));
    cm.lambda2.push_back(solve2(L2, {q.zzbar[0] * I_n, q.zzbar[1] * I_n}, r2));
    cm.max_residual = std::max({cm.max_residual, r1, r2});
  }
  if (!cm.lambda1.empty()) {
    const Vec2c& l1 = cm.lambda1.back();
    const Vec2c& l2 = cm.lambda2.back();
    cm.tail_estimate = std::hypot(std::abs(l1[0]), std::abs(l1[1])) + std::hypot(std::abs(l2[0]), std::abs(l2[1]));
  }
  return cm;
}

VProfiles::VProfiles(const CenterManifoldData& cm, const EigenvectorData& ev, const Mode& n0, cplx K20, cplx K11,
                     cplx K02)
    : cm_(&cm), ev_(ev), b0_(eigenfunction(n0)), K20_(K20), K11_(K11), K02_(K02) {}

Vec2c VProfiles::v20(double theta, double x) const {
  const cplx iwt = I * ev_.omega * ev_.tau_c;
  const double bx = b0_(x);
  const cplx a = -K20_ / iwt * std::exp(iwt * theta) * bx;
  const cplx bb = -std::conj(K02_) / (3.0 * iwt) * std::exp(-iwt * theta) * bx;
  const cplx e2 = std::exp(2.0 * iwt * theta);
  const Vec2c lam = cm_->lambda1_at(x);
  return {a + bb + lam[0] * e2, a * ev_.p1 + bb * std::conj(ev_.p1) + lam[1] * e2};
}

Vec2c VProfiles::v11(double theta, double x) const {
  const cplx iwt = I * ev_.omega * ev_.tau_c;
  const double bx = b0_(x);
  const cplx a = K11_ / iwt * std::exp(iwt * theta) * bx;
  const cplx bb = -std::conj(K11_) / iwt * std::exp(-iwt * theta) * bx;
  const Vec2c lam = cm_->lambda2_at(x);
  return {a + bb + lam[0], a * ev_.p1 + bb * std::conj(ev_.p1) + lam[1]};
}

std::array<Vec2c, 4> VProfiles::slots(double x) const {
  const cplx iwt = I * ev_.omega * ev_.tau_c;
  const double bx = b0_(x);
  const Vec2c l1 = cm_->lambda1_at(x);
  const Vec2c l2 = cm_->lambda2_at(x);
  const cplx p = ev_.p1;
  const cplx pc = std::conj(p);
  auto v20 = [&](double theta) {
    const cplx a = -K20_ / iwt * std::exp(iwt * theta) * bx;
    const cplx bb = -std::conj(K02_) / (3.0 * iwt) * std::exp(-iwt * theta) * bx;
    const cplx e2 = std::exp(2.0 * iwt * theta);
    return Vec2c{a + bb + l1[0] * e2, a * p + bb * pc + l1[1] * e2};
  };
  auto v11 = [&](double theta) {
    const cplx a = K11_ / iwt * std::exp(iwt * theta) * bx;
    const cplx bb = -std::conj(K11_) / iwt * std::exp(-iwt * theta) * bx;
    return Vec2c{a + bb + l2[0], a * p + bb * pc + l2[1]};
  };
  return {v20(0.0), v11(0.0), v20(-1.0), v11(-1.0)};
}

cplx cubic_k21(const EigenvectorData& ev, const LinearizationCoeffs& k, const VProfiles& v, const Mode& n0,
               double b3bt) {
  const auto& b = k.beta;
  const auto& c = k.gamma;
  const cplx p = ev.p1;
  const cplx pc = std::conj(p);
  const cplx e = std::exp(-I * ev.omega * ev.tau_c);
  const cplx ec = std::conj(e);

  const Vec2c cubic{3.0 * b[7] + 3.0 * b[8] * p * p * pc + b[9] * (pc + 2.0 * p) + b[10] * (p * p + 2.0 * p * pc),
                    3.0 * c[5] + c[6] * (pc + 2.0 * p)};
  const cplx first = 2.0 * ev.tau_c * ev.Psi * dot(ev, cubic) * b3bt;

  const Profile bn = eigenfunction(n0);
  const Profile bt = adjoint_eigenfunction(n0);
  auto kernel = [&](double x) -> cplx {
    const auto s = v.slots(x);
    const Vec2c& a0 = s[0];  // V20(0)
    const Vec2c& a1 = s[1];  // V11(0)
    const Vec2c& am = s[2];  // V20(-1)
    const Vec2c& bm = s[3];  // V11(-1)
    const cplx uu = a0[0] + 2.0 * a1[0];
    const cplx uv = a1[1] + 0.5 * a0[1] + 0.5 * a0[0] * pc + a1[0] * p;
    const cplx vv = a0[1] * pc + 2.0 * a1[1] * p;
    const cplx lag = bm[0] + 0.5 * am[0] + 0.5 * a0[0] * ec + a1[0] * e;
    const cplx K = b[3] * uu + b[4] * uv + b[5] * vv + b[6] * lag +
                   ev.p2_star * (c[2] * uu + c[3] * uv + c[4] * vv);
    return K * bn(x) * bt(x);
  };
  const cplx second = 2.0 * ev.tau_c * ev.Psi * integrate_checked(kernel, n0.length());
  return first + second;
}

HopfClassification classify(const CubicCoeffs& K, const EigenvectorData& ev, cplx dlambda_dtau) {
  if (std::abs(dlambda_dtau.real()) < 1e-12) {
    throw Error(ErrorCode::ZeroTransversality, "Re d lambda / d tau vanishes at the critical delay");
  }
  const double wt = ev.omega * ev.tau_c;
  HopfClassification h;
  h.Gamma1 = I / (2.0 * wt) *
                 (K.K11 * K.K20 - 2.0 * std::norm(K.K11) - std::norm(K.K02) / 3.0) +
             K.K21 / 2.0;
  h.Gamma2 = -h.Gamma1.real() / dlambda_dtau.real();
  h.Gamma3 = 2.0 * h.Gamma1.real();
  h.direction = h.Gamma2 > 0.0 ? Direction::Forward : Direction::Backward;
  h.orbit_stability = h.Gamma3 < 0.0 ? OrbitStability::Stable : OrbitStability::Unstable;
  return h;
}

namespace {

HopfPoint select_point(const LinearAnalysis& a, const NormalFormOptions& opt) {
  if (!opt.n0 && !opt.branch && !opt.j) {
    const auto first = first_hopf_point(a);
    if (!first) throw Error(ErrorCode::NoConvergence, "no Hopf point among the scanned modes");
    return *first;
  }
  for (const auto& hp : a.points) {
    if (opt.n0 && hp.n != *opt.n0) continue;
    if (opt.branch && hp.branch != *opt.branch) continue;
    if (hp.j != opt.j.value_or(0)) continue;
    return hp;
  }
  throw Error(ErrorCode::InvalidArgument, "requested Hopf point does not exist");
}

struct SeriesEvaluation {
  CenterManifoldData cm;
  CubicCoeffs K;
};

double profile_change(const VProfiles& shorter, const VProfiles& longer, double length) {
  const QuadratureGrid grid(length, kDefaultPanels);
  double diff = 0.0;
  double scale = 0.0;
  for (double x : grid.x) {
    const Vec2c s20 = shorter.v20(0.0, x);
    const Vec2c l20 = longer.v20(0.0, x);
    const Vec2c s11 = shorter.v11(0.0, x);
    const Vec2c l11 = longer.v11(0.0, x);
    for (int i = 0; i < 2; ++i) {
      diff = std::max({diff, std::abs(s20[i] - l20[i]), std::abs(s11[i] - l11[i])});
      scale = std::max({scale, std::abs(l20[i]), std::abs(l11[i])});
    }
  }
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<Mode> series_modes(const ModelParams& p, int n_series, int n0) {
  int count = n_series;
  if (p.boundary == Boundary::CFD) count = std::max(count, n0);
  else count = std::max(count, n0 + 1);
  return modes_for(count, p);
}

}  // namespace

NormalFormResult compute_normal_form(const ModelParams& p, const NormalFormOptions& opt) {
  if (opt.n_series < 1) throw Error(ErrorCode::InvalidArgument, "series length must be >= 1");
  const LinearAnalysis a = analyze(p, opt.n_modes, opt.j_max);
  NormalFormResult r;
  r.point = select_point(a, opt);
  r.n_series = opt.n_series;

  const std::vector<Mode> modes = series_modes(p, opt.convergence_check ? 2 * opt.n_series : opt.n_series, r.point.n);
  const Mode& n0 = find_mode(modes, r.point.n);
  const ModalChar& mc = *std::find_if(a.chars.begin(), a.chars.end(), [&](const ModalChar& x) { return x.n == r.point.n; });

  r.eigvec = eigvec_data(a.coeffs, n0, r.point, p.eps);
  r.b2bt = mode_integral(IntegralKind::B2Bt, n0);
  r.b3bt = mode_integral(IntegralKind::B3Bt, n0);
  std::tie(r.K.K20, r.K.K11) = cubic_k20_k11(r.eigvec, a.coeffs, r.b2bt);
  r.K.K02 = cubic_k02(r.eigvec, a.coeffs, r.b2bt);

  const std::size_t n_short = std::min<std::size_t>(modes.size(), series_modes(p, opt.n_series, r.point.n).size());
  const std::span<const Mode> short_modes(modes.data(), n_short);
  const CenterManifoldData cm = lambda_series(r.eigvec, a.coeffs, n0, short_modes, p.eps);
  r.lambda_residual = cm.max_residual;
  const VProfiles v(cm, r.eigvec, n0, r.K.K20, r.K.K11, r.K.K02);
  r.K.K21 = cubic_k21(r.eigvec, a.coeffs, v, n0, r.b3bt);

  if (opt.convergence_check) {
    const CenterManifoldData cm_long = lambda_series(r.eigvec, a.coeffs, n0, modes, p.eps);
    const VProfiles v_long(cm_long, r.eigvec, n0, r.K.K20, r.K.K11, r.K.K02);
    r.series_change = profile_change(v, v_long, n0.length());
    r.lambda_residual = std::max(r.lambda_residual, cm_long.max_residual);
    if (r.series_change >= 1e-6) {
      std::ostringstream msg;
      msg << "Lambda series not converged: doubling the series changes V profiles by " << r.series_change;
      r.warnings.push_back(msg.str());
    }
  }

  r.transversality = transversality(mc, r.point.branch, r.point.omega, r.point.tau);
  r.dlambda_numeric = dlambda_dtau_numeric(mc, r.point.omega, r.point.tau);
  if (std::abs(r.dlambda_numeric - r.transversality.dlambda_dtau) > 1e-6) {
    std::ostringstream msg;
    msg << "implicit d lambda/d tau " << r.transversality.dlambda_dtau << " disagrees with root tracking "
        << r.dlambda_numeric;
    throw Error(ErrorCode::TransversalityMismatch, msg.str());
  }
  r.classification = classify(r.K, r.eigvec, r.transversality.dlambda_dtau);
  return r;
}

double series_profile_change(const ModelParams& p, const HopfPoint& hp, int n_short, int n_long) {
  const LinearAnalysis a = analyze(p, 1, 0);
  const std::vector<Mode> modes = series_modes(p, std::max(n_short, n_long), hp.n);
  const Mode& n0 = find_mode(modes, hp.n);
  const EigenvectorData ev = eigvec_data(a.coeffs, n0, hp, p.eps);
  const double b2bt = mode_integral(IntegralKind::B2Bt, n0);
  const auto [K20, K11] = cubic_k20_k11(ev, a.coeffs, b2bt);
  const cplx K02 = cubic_k02(ev, a.coeffs, b2bt);
  const std::size_t ns = series_modes(p, n_short, hp.n).size();
  const std::size_t nl = series_modes(p, n_long, hp.n).size();
  const CenterManifoldData cs = lambda_series(ev, a.coeffs, n0, std::span<const Mode>(modes.data(), ns), p.eps);
  const CenterManifoldData cl = lambda_series(ev, a.coeffs, n0, std::span<const Mode>(modes.data(), nl), p.eps);
  return profile_change(VProfiles(cs, ev, n0, K20, K11, K02), VProfiles(cl, ev, n0, K20, K11, K02), n0.length());
}

}  // namespace advhopf
