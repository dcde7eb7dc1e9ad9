#include "advhopf/quadrature.hpp"

namespace advhopf {

QuadratureGrid::QuadratureGrid(double len, int n) : panels(n), length(len) {
  if (n < 2 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "Simpson needs an even panel count >= 2");
  if (!(len > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature interval must have positive length");
  const double h = len / n;
  x.resize(n + 1);
  w.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    x[i] = (i == n) ? len : i * h;
    const double c = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * h / 3.0;
  }
}

}  // namespace advhopf
