#include "advhopf/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "advhopf/error.hpp"

namespace advhopf {

using std::numbers::pi;

double Profile::value(double x) const noexcept {
  const double t = rho_ * x;
  return scale_ * std::exp(k_ * x) * (std::cos(t) + c_ * std::sin(t));
}

double Profile::derivative(double x) const noexcept {
  const double t = rho_ * x;
  const double A = k_ + c_ * rho_;
  const double B = k_ * c_ - rho_;
  return scale_ * std::exp(k_ * x) * (A * std::cos(t) + B * std::sin(t));
}

double Profile::second_derivative(double x) const noexcept {
  const double t = rho_ * x;
  const double A = k_ + c_ * rho_;
  const double B = k_ * c_ - rho_;
  return scale_ * std::exp(k_ * x) * ((k_ * A + B * rho_) * std::cos(t) + (k_ * B - A * rho_) * std::sin(t));
}

std::vector<double> Profile::sample(const std::vector<double>& x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = value(x[i]);
  return out;
}

namespace {

constexpr double kBranchOffset = 1e-9;

double sigma_from_offset(int n, double delta, double l) {
  return ((n - 0.5) * pi + delta) / (l * pi);
}

// Start panel count so that the highest wavenumber is resolved at roughly
// 20 panels per radian of phase over the interval; never below the default.
int panels_for(double wavenumber, double length) {
  const double wanted = 20.0 * wavenumber * length;
  int panels = kDefaultPanels;
  while (panels < wanted && panels < (1 << 22)) panels *= 2;
  return panels;
}

Profile raw_eigenfunction(const Mode& m) {
  const double k = m.q1 / (2.0 * m.d1);
  if (m.boundary == Boundary::FF && m.n == 0) return {1.0, 0.0, 0.0, 0.0};
  if (m.boundary == Boundary::CFD) return {1.0, k, m.sigma, m.q1 / (2.0 * m.d1 * m.sigma)};
  return {1.0, k, m.sigma, -m.q1 / (2.0 * m.d1 * m.sigma)};
}

Profile raw_adjoint(const Mode& m) {
  const double k = -m.q1 / (2.0 * m.d1);
  if (m.boundary == Boundary::FF && m.n == 0) return {1.0, -m.q1 / m.d1, 0.0, 0.0};
  if (m.boundary == Boundary::CFD) return {1.0, k, m.sigma, m.q1 / (2.0 * m.d1 * m.sigma)};
  return {1.0, k, m.sigma, -m.q1 / (2.0 * m.d1 * m.sigma)};
}

double l2_norm(const Profile& f, double wavenumber, double length) {
  const double sq = integrate_checked([&](double x) { const double y = f(x); return y * y; }, length,
                                      panels_for(2.0 * wavenumber, length));
  return std::sqrt(sq);
}

void fill_norms(Mode& m) {
  m.norm = l2_norm(raw_eigenfunction(m), m.sigma, m.length());
  m.adjoint_norm = l2_norm(raw_adjoint(m), m.sigma, m.length());
}

}  // namespace

namespace {

// Offset delta of the n-th root, found by bisection to machine precision.
double cfd_offset(int n, double d1, double q1, double l) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "CFD mode index must be >= 1");
  if (!(d1 > 0.0) || !(l > 0.0) || !(q1 >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cfd_sigma needs d1 > 0, l > 0, q1 >= 0");
  }
  if (q1 == 0.0) return 0.0;

  // With l*pi*sigma = (n - 1/2) pi + delta, tan(l*pi*sigma) = -cot(delta); the
  // root condition becomes q1 cos(delta) - 2 d1 sigma sin(delta) = 0, which is
  // positive near delta = 0 and negative near delta = pi.
  auto h = [&](double delta) {
    const double s = sigma_from_offset(n, delta, l);
    return q1 * std::cos(delta) - 2.0 * d1 * s * std::sin(delta);
  };
  double lo = kBranchOffset;
  double hi = pi - kBranchOffset;
  double hlo = h(lo);
  const double hhi = h(hi);
  if (!(hlo > 0.0 && hhi < 0.0)) {
    std::ostringstream msg;
    msg << "no sign change for mode " << n << " (q1=" << q1 << " too small for the branch offset)";
    throw Error(ErrorCode::BracketFailure, msg.str());
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double hm = h(mid);
    if (hm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((hm > 0.0) == (hlo > 0.0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double cfd_sigma(int n, double d1, double q1, double l) {
  return sigma_from_offset(n, cfd_offset(n, d1, q1, l), l);
}

namespace {

Mode make_cfd_mode(int n, const ModelParams& p) {
  Mode m;
  m.n = n;
  m.boundary = Boundary::CFD;
  m.d1 = p.d1;
  m.q1 = p.q1;
  m.l = p.l;
  m.branch_offset = cfd_offset(n, p.d1, p.q1, p.l);
  m.sigma = sigma_from_offset(n, m.branch_offset, p.l);
  m.nu = p.q1 * p.q1 / (4.0 * p.d1) + p.d1 * m.sigma * m.sigma;
  fill_norms(m);
  return m;
}

}  // namespace

double cfd_root_residual(const Mode& mode) {
  if (mode.q1 == 0.0) return std::abs(std::cos(mode.l * pi * mode.sigma));
  const double delta = mode.branch_offset;
  const double cot = std::cos(delta) / std::sin(delta);
  return std::abs(-cot + 2.0 * mode.d1 * mode.sigma / mode.q1);
}

std::vector<Mode> cfd_modes(int count, const ModelParams& p) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "mode count must be >= 1");
  std::vector<Mode> out;
  out.reserve(count);
  for (int n = 1; n <= count; ++n) out.push_back(make_cfd_mode(n, p));
  return out;
}

std::vector<Mode> ff_modes(int count, const ModelParams& p) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "mode count must be >= 1");
  std::vector<Mode> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    Mode m;
    m.n = n;
    m.boundary = Boundary::FF;
    m.d1 = p.d1;
    m.q1 = p.q1;
    m.l = p.l;
    if (n == 0) {
      m.nu = 0.0;
      m.sigma = 0.0;
    } else {
      m.nu = p.q1 * p.q1 / (4.0 * p.d1) + p.d1 * n * n / (p.l * p.l);
      m.sigma = std::sqrt(4.0 * p.d1 * m.nu - p.q1 * p.q1) / (2.0 * p.d1);
    }
    fill_norms(m);
    out.push_back(m);
  }
  return out;
}

std::vector<Mode> modes_for(int count, const ModelParams& p) {
  return p.boundary == Boundary::CFD ? cfd_modes(count, p) : ff_modes(count, p);
}

Profile eigenfunction(const Mode& mode) { return raw_eigenfunction(mode).scaled(1.0 / mode.norm); }

Profile adjoint_eigenfunction(const Mode& mode) { return raw_adjoint(mode).scaled(1.0 / mode.adjoint_norm); }

double mode_integral(IntegralKind kind, const Mode& n0, const Mode* other,
                     const std::function<double(double)>& weight, int panels) {
  const Profile b = eigenfunction(n0);
  const Profile bt = adjoint_eigenfunction(n0);
  const double L = n0.length();
  const auto start = [&](double wavenumber) { return std::max(panels, panels_for(wavenumber, L)); };
  switch (kind) {
    case IntegralKind::B2Bt:
      return integrate_checked([&](double x) { const double y = b(x); return y * y * bt(x); }, L,
                               start(3.0 * n0.sigma));
    case IntegralKind::B3Bt:
      return integrate_checked([&](double x) { const double y = b(x); return y * y * y * bt(x); }, L,
                               start(4.0 * n0.sigma));
    case IntegralKind::B2B: {
      if (other == nullptr) throw Error(ErrorCode::InvalidArgument, "B2B integral needs a second mode");
      const Profile bn = eigenfunction(*other);
      return integrate_checked([&](double x) { const double y = b(x); return y * y * bn(x); }, L,
                               start(2.0 * n0.sigma + other->sigma));
    }
    case IntegralKind::BtB: {
      if (other == nullptr) throw Error(ErrorCode::InvalidArgument, "BtB integral needs a second mode");
      const Profile bn = eigenfunction(*other);
      return integrate_checked([&](double x) { return bt(x) * bn(x); }, L, start(n0.sigma + other->sigma));
    }
    case IntegralKind::WeightedBBt:
      if (!weight) throw Error(ErrorCode::InvalidArgument, "weighted integral needs a weight profile");
      return integrate_checked([&](double x) { return weight(x) * b(x) * bt(x); }, L, start(2.0 * n0.sigma));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown integral kind");
}

std::vector<double> finite_difference_eigenvalues(const ModelParams& p, int grid_size, int k) {
  if (grid_size < 1000) throw Error(ErrorCode::InvalidArgument, "finite-difference oracle needs grid_size >= 1000");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const double h = p.length() / grid_size;
  const double D = p.d1 / (h * h);
  const double Q = p.q1 / (2.0 * h);

  // Tridiagonal rows of A = -(d1 D2 - q1 D1): diag, lower (i,i-1), upper (i,i+1).
  // CFD unknowns: nodes 0..N-1 (node N is Dirichlet). FF unknowns: nodes 0..N.
  const int n = p.boundary == Boundary::CFD ? grid_size : grid_size + 1;
  std::vector<double> diag(n, 2.0 * D), lower(n, -(D + Q)), upper(n, -(D - Q));
  if (p.boundary == Boundary::CFD) {
    // Ghost u_{-1} = u_1 - 2 h (q1/d1) u_0 from d1 u_x - q1 u = 0.
    diag[0] = 2.0 * D + 2.0 * p.q1 / h + p.q1 * p.q1 / p.d1;
    upper[0] = -2.0 * D;
  } else {
    upper[0] = -2.0 * D;
    lower[n - 1] = -2.0 * D;
  }

  // Diagonal similarity transform to a symmetric tridiagonal matrix; valid
  // because every product upper[i]*lower[i+1] is positive here.
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d(i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    const double prod = upper[i] * lower[i + 1];
    if (!(prod > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "grid too coarse: cell Peclet number >= 1");
    }
    e(i) = -std::sqrt(prod);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + std::min<int>(k, n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace advhopf
