#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include "advhopf/error.hpp"

namespace advhopf {

inline constexpr int kDefaultPanels = 2048;

/// Composite Simpson rule on [0, length] with an even number of panels.
struct QuadratureGrid {
  int panels = 0;
  double length = 0.0;
  std::vector<double> x;
  std::vector<double> w;

  QuadratureGrid() = default;
  QuadratureGrid(double length, int panels);

  std::size_t size() const noexcept { return x.size(); }

  template <class F>
  auto integrate(F&& f) const {
    using R = std::decay_t<decltype(f(0.0))>;
    R sum{};
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * f(x[i]);
    return sum;
  }

  /// Weighted sum of pre-sampled nodal values (size must match).
  template <class T>
  T integrate_samples(const std::vector<T>& values) const {
    T sum{};
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * values[i];
    return sum;
  }
};

inline constexpr double kQuadratureRelTol = 1e-9;

/// Simpson value on `panels` panels, accepted once doubling the panel count
/// changes it by less than kQuadratureRelTol relative to max(|I|, int |f|).
/// Up to three refinements are attempted before QuadratureNotConverged.
template <class F>
auto integrate_checked(F&& f, double length, int panels = kDefaultPanels) {
  for (int refinement = 0; refinement <= 3; ++refinement) {
    const QuadratureGrid coarse(length, panels);
    const QuadratureGrid fine(length, 2 * panels);
    const auto coarse_value = coarse.integrate(f);
    const auto fine_value = fine.integrate(f);
    const double scale = fine.integrate([&](double x) { return std::abs(f(x)); });
    const double ref = std::max(std::abs(fine_value), scale);
    if (std::abs(fine_value - coarse_value) <= kQuadratureRelTol * ref) return coarse_value;
    panels *= 2;
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              "Simpson refinement check failed after 3 refinements");
}

}  // namespace advhopf
