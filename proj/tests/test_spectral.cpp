#include <doctest.h>

#include <cmath>
#include <numbers>

#include "advhopf/spectral.hpp"

using namespace advhopf;
using std::numbers::pi;

namespace {

ModelParams with(double d1, double q1, Boundary b) {
  ModelParams p = ModelParams::reference();
  p.d1 = d1;
  p.q1 = q1;
  p.boundary = b;
  return p;
}

// Shooting oracle: integrate d1 X'' - q1 X' + nu X = 0 from the upstream
// boundary with RK4 and return the downstream boundary functional.
double shoot(double nu, const ModelParams& p) {
  const int steps = 4000;
  const double L = p.length();
  const double h = L / steps;
  double x0 = 1.0;
  double x1 = p.boundary == Boundary::CFD ? p.q1 / p.d1 : 0.0;
  auto rhs = [&](double X, double Xp) { return std::array<double, 2>{Xp, (p.q1 * Xp - nu * X) / p.d1}; };
  for (int i = 0; i < steps; ++i) {
    const auto k1 = rhs(x0, x1);
    const auto k2 = rhs(x0 + 0.5 * h * k1[0], x1 + 0.5 * h * k1[1]);
    const auto k3 = rhs(x0 + 0.5 * h * k2[0], x1 + 0.5 * h * k2[1]);
    const auto k4 = rhs(x0 + h * k3[0], x1 + h * k3[1]);
    x0 += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    x1 += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return p.boundary == Boundary::CFD ? x0 : x1;
}

std::vector<double> shooting_eigenvalues(const ModelParams& p, int k, double nu_max) {
  std::vector<double> out;
  if (p.boundary == Boundary::FF) out.push_back(0.0);
  const int scan = 3000;
  double a = 1e-7;
  double fa = shoot(a, p);
  for (int i = 1; i <= scan && static_cast<int>(out.size()) < k; ++i) {
    const double b = nu_max * i / scan;
    const double fb = shoot(b, p);
    if (fa * fb < 0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot(mid, p);
        if (flo * fm <= 0) hi = mid;
        else lo = mid, flo = fm;
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return out;
}

}  // namespace

TEST_CASE("CFD roots: branch, residual, ordering") {
  const ModelParams p = ModelParams::reference();
  const double s1 = cfd_sigma(1, p.d1, p.q1, p.l);
  // advection pushes the first root just past the Dirichlet value 1/(2l)
  CHECK(s1 > 0.05);
  CHECK(s1 < 0.055);
  const auto modes = cfd_modes(8, p);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const Mode& m = modes[i];
    CHECK(cfd_root_residual(m) <= 1e-12);
    CHECK(m.sigma > (2.0 * m.n - 1) / (2 * p.l));
    CHECK(m.sigma < (2.0 * m.n + 1) / (2 * p.l));
    CHECK(m.nu == doctest::Approx(p.q1 * p.q1 / (4 * p.d1) + p.d1 * m.sigma * m.sigma).epsilon(1e-14));
    if (i > 0) CHECK(m.nu > modes[i - 1].nu);
  }
  CHECK(modes[0].nu > p.q1 * p.q1 / (4 * p.d1));
}

TEST_CASE("CFD roots approach the Dirichlet limit as q1 -> 0") {
  const double d1 = 0.3, l = 10.0;
  CHECK(cfd_sigma(1, d1, 0.0, l) == doctest::Approx(0.05));
  double prev = 1.0;
  for (double q1 : {1e-2, 1e-3, 1e-4}) {
    const double err = cfd_sigma(2, d1, q1, l) - 3.0 / (2 * l);
    CHECK(err > 0.0);
    CHECK(err < prev);
    // first-order in q1
    CHECK(err / q1 < 1.0);
    prev = err;
  }
}

TEST_CASE("FF spectrum closed form") {
  const ModelParams p = with(0.3, 0.001, Boundary::FF);
  const auto modes = ff_modes(4, p);
  CHECK(modes[0].n == 0);
  CHECK(modes[0].nu == 0.0);
  CHECK(modes[1].nu == doctest::Approx(0.001 * 0.001 / (4 * 0.3) + 0.3 / 100).epsilon(1e-14));
  const Profile b0 = eigenfunction(modes[0]);
  CHECK(b0(0.0) == doctest::Approx(b0(p.length())));

  const ModelParams q = with(0.3, 0.0, Boundary::FF);
  const auto pure = ff_modes(4, q);
  for (int n = 1; n < 4; ++n) {
    CHECK(pure[n].nu == doctest::Approx(0.3 * n * n / 100.0).epsilon(1e-14));
    const Profile b = eigenfunction(pure[n]);
    const double scale = b(0.0);
    for (double x : {0.3, 4.0, 17.0, 30.0}) CHECK(b(x) == doctest::Approx(scale * std::cos(n * x / 10.0)).epsilon(1e-12));
  }
}

TEST_CASE("eigenfunctions: normalization, ODE and boundary conditions") {
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    const ModelParams p = with(0.3, 0.001, bc);
    const QuadratureGrid grid(p.length(), 4096);
    for (const Mode& m : modes_for(6, p)) {
      const Profile b = eigenfunction(m);
      const Profile bt = adjoint_eigenfunction(m);
      CHECK(std::abs(grid.integrate([&](double x) { return b(x) * b(x); }) - 1.0) < 1e-10);
      CHECK(std::abs(grid.integrate([&](double x) { return bt(x) * bt(x); }) - 1.0) < 1e-10);
      for (std::size_t i = 1; i + 1 < grid.x.size(); i += 97) {
        const double x = grid.x[i];
        CHECK(std::abs(p.d1 * b.second_derivative(x) - p.q1 * b.derivative(x) + m.nu * b(x)) < 1e-6);
        CHECK(std::abs(p.d1 * bt.second_derivative(x) + p.q1 * bt.derivative(x) + m.nu * bt(x)) < 1e-6);
      }
      if (bc == Boundary::CFD) {
        CHECK(std::abs(b(p.length())) < 1e-8);
        CHECK(std::abs(p.d1 * b.derivative(0.0) - p.q1 * b(0.0)) < 1e-8);
        CHECK(std::abs(bt.derivative(0.0)) < 1e-8);
        CHECK(std::abs(bt(p.length())) < 1e-8);
      } else {
        CHECK(std::abs(b.derivative(0.0)) < 1e-8);
        CHECK(std::abs(b.derivative(p.length())) < 1e-8);
        CHECK(std::abs(p.d1 * bt.derivative(0.0) + p.q1 * bt(0.0)) < 1e-8);
        CHECK(std::abs(p.d1 * bt.derivative(p.length()) + p.q1 * bt(p.length())) < 1e-8);
      }
    }
  }
}

TEST_CASE("adjoint equals the eigenfunction without advection") {
  const ModelParams p = with(0.3, 0.0, Boundary::CFD);
  for (const Mode& m : cfd_modes(4, p)) {
    const Profile b = eigenfunction(m);
    const Profile bt = adjoint_eigenfunction(m);
    for (double x = 0.0; x <= p.length(); x += 0.5) CHECK(std::abs(b(x) - bt(x)) < 1e-10);
  }
}

TEST_CASE("biorthogonality up to mode 8") {
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    const auto modes = modes_for(8, with(0.3, 0.001, bc));
    for (const Mode& a : modes) {
      for (const Mode& b : modes) {
        if (a.n == b.n) continue;
        CHECK(std::abs(mode_integral(IntegralKind::BtB, a, &b)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("mode integrals") {
  const ModelParams p = with(0.3, 0.0, Boundary::FF);
  const Mode m0 = ff_modes(1, p)[0];
  CHECK(mode_integral(IntegralKind::B2B, m0, &m0) == doctest::Approx(1.0 / std::sqrt(p.length())).epsilon(1e-12));

  const Mode c1 = cfd_modes(1, ModelParams::reference())[0];
  const Profile b = eigenfunction(c1);
  const Profile bt = adjoint_eigenfunction(c1);
  auto f = [&](double x) { return b(x) * b(x) * bt(x); };
  const double coarse = QuadratureGrid(c1.length(), kDefaultPanels).integrate(f);
  const double fine = QuadratureGrid(c1.length(), 2 * kDefaultPanels).integrate(f);
  CHECK(std::abs(fine - coarse) / std::abs(coarse) < 1e-9);
  CHECK(mode_integral(IntegralKind::B2Bt, c1) == doctest::Approx(coarse).epsilon(1e-12));

  const double w = mode_integral(IntegralKind::WeightedBBt, c1, nullptr, [](double) { return 1.0; });
  CHECK(w == doctest::Approx(mode_integral(IntegralKind::BtB, c1, &c1)).epsilon(1e-12));
}

TEST_CASE("Simpson is exact on cubics") {
  const double L = 10 * pi;
  const QuadratureGrid g(L, 64);
  CHECK(g.integrate([](double x) { return x * x * x; }) == doctest::Approx(L * L * L * L / 4).epsilon(1e-12));
}

TEST_CASE("shooting oracle agrees with the analytic spectrum") {
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    const ModelParams p = with(0.3, 0.001, bc);
    const auto modes = modes_for(5, p);
    const auto shot = shooting_eigenvalues(p, 5, modes.back().nu * 1.05);
    REQUIRE(shot.size() == 5);
    for (int i = 0; i < 5; ++i) {
      if (modes[i].nu == 0.0) continue;
      CHECK(std::abs(shot[i] - modes[i].nu) / modes[i].nu < 1e-6);
    }
  }
}

TEST_CASE("finite-difference oracle on a 3x3 (d1, q1) grid") {
  for (Boundary bc : {Boundary::CFD, Boundary::FF}) {
    for (double d1 : {0.1, 0.3, 1.0}) {
      for (double q1 : {0.0005, 0.001, 0.01}) {
        const ModelParams p = with(d1, q1, bc);
        const auto modes = modes_for(5, p);
        const auto fd = finite_difference_eigenvalues(p, 4000, 5);
        for (int i = 0; i < 5; ++i) {
          if (modes[i].nu == 0.0) {
            CHECK(std::abs(fd[i]) < 1e-8);
            continue;
          }
          CHECK(std::abs(fd[i] - modes[i].nu) / modes[i].nu < 1e-4);
        }
      }
    }
  }
  const auto neumann = finite_difference_eigenvalues(with(0.3, 0.0, Boundary::FF), 4000, 4);
  for (int n = 1; n < 4; ++n) CHECK(neumann[n] == doctest::Approx(0.3 * n * n / 100.0).epsilon(1e-4));
}
