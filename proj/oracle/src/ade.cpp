#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "hpvpinn/error.hpp"
#include "hpvpinn/oracle.hpp"

namespace hpvpinn::oracle {

namespace {

double bilinear(double f00, double f01, double f10, double f11, double s, double r) {
  return (1 - s) * ((1 - r) * f00 + r * f01) + s * ((1 - r) * f10 + r * f11);
}

// locate p on a uniform axis of n nodes: returns cell index and local coordinate
std::pair<int, double> locate(double p, double lo, double hi, int n) {
  const double u = (p - lo) / (hi - lo) * (n - 1);
  const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
  return {i, u - i};
}

}  // namespace

double SpaceTimeGrid::operator()(double t, double x) const {
  const double tol = 1e-12;
  HPVPINN_EXPECTS(t >= t0 - tol && t <= t1 + tol && x >= x0 - tol && x <= x1 + tol, "point outside the grid");
  const auto [it, s] = locate(t, t0, t1, nt);
  const auto [ix, r] = locate(x, x0, x1, nx);
  return bilinear(at(it, ix), at(it, ix + 1), at(it + 1, ix), at(it + 1, ix + 1), s, r);
}

void SpaceTimeGrid::write_csv(std::ostream& os, int stride) const {
  HPVPINN_EXPECTS(stride >= 1, "stride must be positive");
  os.precision(17);
  os << std::scientific << "t,x,u\n";
  for (int it = 0; it < nt; it += stride) {
    for (int ix = 0; ix < nx; ix += stride) os << t(it) << ',' << x(ix) << ',' << at(it, ix) << '\n';
  }
}

SpaceTimeGrid ade_reference(double v, double kappa, int nx, int nt) {
  HPVPINN_EXPECTS(nx >= 100 && nt >= 100, "reference grid needs at least 100 nodes per axis");
  HPVPINN_EXPECTS(kappa >= 0.0, "diffusivity must be non-negative");
  SpaceTimeGrid g;
  g.nx = nx;
  g.nt = nt;
  g.values.assign(static_cast<std::size_t>(nx) * nt, 0.0);
  const double h = (g.x1 - g.x0) / (nx - 1);
  const double dt = (g.t1 - g.t0) / (nt - 1);

  // L u_i = -v (u_{i+1} - u_{i-1}) / 2h + kappa (u_{i+1} - 2u_i + u_{i-1}) / h^2
  const double lo = v / (2 * h) + kappa / (h * h);   // coefficient of u_{i-1}
  const double mid = -2 * kappa / (h * h);
  const double hi = -v / (2 * h) + kappa / (h * h);  // coefficient of u_{i+1}

  std::vector<double> u(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) u[i] = -std::sin(std::numbers::pi * g.x(i));
  u.front() = u.back() = 0.0;
  std::copy(u.begin(), u.end(), g.values.begin());

  // (I - dt/2 L) u^{n+1} = (I + dt/2 L) u^n on interior nodes, solved by the Thomas algorithm
  const int m = nx - 2;
  const double a = -0.5 * dt * lo, b = 1.0 - 0.5 * dt * mid, c = -0.5 * dt * hi;
  std::vector<double> cp(static_cast<std::size_t>(m)), dp(static_cast<std::size_t>(m)), rhs(static_cast<std::size_t>(m));
  for (int n = 1; n < nt; ++n) {
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      rhs[k] = u[i] + 0.5 * dt * (lo * u[i - 1] + mid * u[i] + hi * u[i + 1]);
    }
    cp[0] = c / b;
    dp[0] = rhs[0] / b;
    for (int k = 1; k < m; ++k) {
      const double denom = b - a * cp[k - 1];
      cp[k] = c / denom;
      dp[k] = (rhs[k] - a * dp[k - 1]) / denom;
    }
    u[m] = dp[m - 1];
    for (int k = m - 2; k >= 0; --k) u[k + 1] = dp[k] - cp[k] * u[k + 2];
    std::copy(u.begin(), u.end(), g.values.begin() + static_cast<std::ptrdiff_t>(n) * nx);
  }
  return g;
}

}  // namespace hpvpinn::oracle
