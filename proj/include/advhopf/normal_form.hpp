#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advhopf/model.hpp"
#include "advhopf/spectral.hpp"
#include "advhopf/stability.hpp"

namespace advhopf {

using Vec2c = std::array<cplx, 2>;

/// Center-subspace eigenvector data at a critical delay. `p1` is the predator
/// component of the right eigenvector (1, p1); `p2_star` the predator
/// component of the left eigenvector (1, p2_star); `Psi` the normalization
/// 1 / (1 + p1 p2_star + beta2 tau_c e^{-i omega tau_c}).
struct EigenvectorData {
  cplx p1;
  cplx p2_star;
  cplx Psi;
  double omega = 0.0;
  double tau_c = 0.0;
  int n0 = 0;
  double nu = 0.0;
};

/// Throws SingularNormalization when |1 + p1 p2_star + beta2 tau e^{-i omega tau}| < 1e-12.
EigenvectorData eigvec_data(const LinearizationCoeffs& k, const Mode& mode, const HopfPoint& hp, double eps);

/// Modal matrix lambda I + [[nu - beta0 - beta2 e^{-lambda tau}, -beta1], [-gamma0, eps nu - gamma1]].
std::array<std::array<cplx, 2>, 2> modal_matrix(const LinearizationCoeffs& k, double nu, double eps, cplx lambda,
                                                 double tau);

/// Quadratic forcing brackets of the z^2, z*zbar and zbar^2 terms.
struct QuadraticBrackets {
  Vec2c z2;     // (beta3 + beta4 p1 + beta5 p1^2 + beta6 e^{-i w tau}, gamma2 + gamma3 p1 + gamma4 p1^2)
  Vec2c zzbar;  // (2 beta3 + beta4 (p1 + conj p1) + 2 beta5 |p1|^2 + 2 beta6 cos(w tau), ...)
  Vec2c zbar2;  // conjugate substitution of z2: p1 -> conj p1, e^{-i w tau} -> e^{i w tau}
};

QuadraticBrackets quadratic_brackets(const LinearizationCoeffs& k, const EigenvectorData& ev);

struct CubicCoeffs {
  cplx K20;
  cplx K11;
  cplx K02;
  cplx K21;
};

/// K20 and K11 from the brackets and int b_{n0}^2 bt_{n0}.
std::pair<cplx, cplx> cubic_k20_k11(const EigenvectorData& ev, const LinearizationCoeffs& k, double b2bt);

/// K02 from the conjugate-substituted bracket.
cplx cubic_k02(const EigenvectorData& ev, const LinearizationCoeffs& k, double b2bt);

/// Modal coefficients of the second-order center-manifold terms.
struct CenterManifoldData {
  std::vector<Mode> modes;
  std::vector<Profile> basis;        // b_n for each entry of modes
  std::vector<double> coupling;      // int b_{n0}^2 b_n
  std::vector<Vec2c> lambda1;        // solves L1(n) x = 2 * z2 bracket * coupling_n
  std::vector<Vec2c> lambda2;        // solves L2(n) x = zzbar bracket * coupling_n
  double max_residual = 0.0;         // largest back-substitution residual over all solves
  double tail_estimate = 0.0;        // |Lambda_{1,N}| + |Lambda_{2,N}| of the last retained mode

  Vec2c lambda1_at(double x) const;
  Vec2c lambda2_at(double x) const;
};

/// Throws SingularL when |det L1(n)| or |det L2(n)| < 1e-12.
CenterManifoldData lambda_series(const EigenvectorData& ev, const LinearizationCoeffs& k, const Mode& n0,
                                 std::span<const Mode> modes, double eps);

/// V20(theta) and V11(theta) as spatial profiles, theta in [-1, 0].
class VProfiles {
 public:
  VProfiles(const CenterManifoldData& cm, const EigenvectorData& ev, const Mode& n0, cplx K20, cplx K11, cplx K02);

  Vec2c v20(double theta, double x) const;
  Vec2c v11(double theta, double x) const;

  /// All four slots needed by K21 at one x: V20(0), V11(0), V20(-1), V11(-1).
  std::array<Vec2c, 4> slots(double x) const;

 private:
  const CenterManifoldData* cm_;
  EigenvectorData ev_;
  Profile b0_;
  cplx K20_, K11_, K02_;
};

/// K21: cubic bracket times int b^3 bt plus the center-manifold correction
/// int K(x) b bt, where K(x) mixes V20 and V11 at theta = 0 and -1.
cplx cubic_k21(const EigenvectorData& ev, const LinearizationCoeffs& k, const VProfiles& v, const Mode& n0,
               double b3bt);

enum class Direction { Forward, Backward };
enum class OrbitStability { Stable, Unstable };

const char* to_string(Direction d) noexcept;
const char* to_string(OrbitStability s) noexcept;

struct HopfClassification {
  cplx Gamma1;
  double Gamma2 = 0.0;
  double Gamma3 = 0.0;
  Direction direction = Direction::Forward;
  OrbitStability orbit_stability = OrbitStability::Stable;
};

/// Throws ZeroTransversality when |Re dlambda_dtau| < 1e-12.
HopfClassification classify(const CubicCoeffs& K, const EigenvectorData& ev, cplx dlambda_dtau);

struct NormalFormOptions {
  int n_modes = 8;     // modes scanned for the critical point
  int j_max = 6;
  int n_series = 50;   // modes retained in the Lambda series
  bool convergence_check = true;  // also evaluate with 2 * n_series
  // Optional explicit selection of the critical point; default is the
  // minimal critical delay.
  std::optional<int> n0;
  std::optional<Branch> branch;
  std::optional<int> j;
};

struct NormalFormResult {
  HopfPoint point;
  EigenvectorData eigvec;
  CubicCoeffs K;
  HopfClassification classification;
  Transversality transversality;
  cplx dlambda_numeric;
  double b2bt = 0.0;
  double b3bt = 0.0;
  int n_series = 0;
  double series_change = 0.0;  // sup relative change of V20(0), V11(0) when doubling the series
  double lambda_residual = 0.0;
  std::vector<std::string> warnings;
};

NormalFormResult compute_normal_form(const ModelParams& p, const NormalFormOptions& opt = {});

/// Sup-norm relative difference of V20(0) and V11(0) between two series
/// lengths on the default quadrature nodes.
double series_profile_change(const ModelParams& p, const HopfPoint& hp, int n_short, int n_long);

}  // namespace advhopf
