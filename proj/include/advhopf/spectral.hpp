#pragma once

#include <functional>
#include <vector>

#include "advhopf/model.hpp"
#include "advhopf/quadrature.hpp"

namespace advhopf {

/// One mode of the advection-diffusion operator -(d1 d_xx - q1 d_x) under a
/// boundary family. `sigma` is sqrt(4 d1 nu - q1^2) / (2 d1), the oscillation
/// wavenumber of the eigenfunction (0 for the FF constant mode n=0).
struct Mode {
  int n = 0;
  Boundary boundary = Boundary::CFD;
  double sigma = 0.0;
  double nu = 0.0;
  double norm = 1.0;          // L2 norm of the raw eigenfunction
  double adjoint_norm = 1.0;  // L2 norm of the raw adjoint eigenfunction
  double branch_offset = 0.0; // CFD only: l*pi*sigma - (n - 1/2)*pi, in (0, pi)
  double d1 = 0.0;
  double q1 = 0.0;
  double l = 0.0;

  double length() const noexcept { return l * std::numbers::pi; }
};

/// scale * exp(k x) * (cos(rho x) + c sin(rho x)), with analytic derivatives.
/// Every eigenfunction and adjoint eigenfunction of both families has this form.
class Profile {
 public:
  Profile() = default;
  Profile(double scale, double k, double rho, double c) : scale_(scale), k_(k), rho_(rho), c_(c) {}

  double operator()(double x) const noexcept { return value(x); }
  double value(double x) const noexcept;
  double derivative(double x) const noexcept;
  double second_derivative(double x) const noexcept;

  std::vector<double> sample(const std::vector<double>& x) const;

  Profile scaled(double factor) const noexcept { return {scale_ * factor, k_, rho_, c_}; }

 private:
  double scale_ = 1.0;
  double k_ = 0.0;
  double rho_ = 0.0;
  double c_ = 0.0;
};

/// n-th root (n >= 1) of tan(l*pi*sigma) = -2 d1 sigma / q1, taken in the branch
/// ((2n-1)/(2l), (2n+1)/(2l)). q1 == 0 returns the limit (2n-1)/(2l).
double cfd_sigma(int n, double d1, double q1, double l);

/// |tan(l*pi*sigma) + 2 d1 sigma / q1| evaluated through the branch offset,
/// which avoids the cancellation near the tangent asymptote.
double cfd_root_residual(const Mode& mode);

std::vector<Mode> cfd_modes(int count, const ModelParams& p);

/// Modes n = 0 .. count-1.
std::vector<Mode> ff_modes(int count, const ModelParams& p);

/// CFD modes 1..count or FF modes 0..count-1, per p.boundary.
std::vector<Mode> modes_for(int count, const ModelParams& p);

/// Normalized eigenfunction b_n.
Profile eigenfunction(const Mode& mode);

/// Normalized adjoint eigenfunction (kernel of d1 m'' + q1 m' + nu m with the
/// adjoint boundary conditions of the family).
Profile adjoint_eigenfunction(const Mode& mode);

enum class IntegralKind {
  B2Bt,     // int b_{n0}^2 * bt_{n0}
  B3Bt,     // int b_{n0}^3 * bt_{n0}
  B2B,      // int b_{n0}^2 * b_n
  WeightedBBt,  // int w(x) b_{n0} bt_{n0}
  BtB,      // int bt_{n0} * b_n
};

/// Quadrature-backed mode integrals with the mandatory refinement check.
/// `other` is used by B2B and BtB; `weight` by WeightedBBt.
double mode_integral(IntegralKind kind, const Mode& n0, const Mode* other = nullptr,
                     const std::function<double(double)>& weight = {},
                     int panels = kDefaultPanels);

/// First k eigenvalues of the centred finite-difference discretization of
/// -(d1 D2 - q1 D1) with ghost-node boundary rows, on `grid_size` intervals.
/// Independent of the analytic route; used as a verification oracle.
std::vector<double> finite_difference_eigenvalues(const ModelParams& p, int grid_size, int k);

}  // namespace advhopf
