#pragma once

// Brute-force references for tests and acceptance runs. Nothing here reuses the core
// quadrature or residual assembly.

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hpvpinn/mesh.hpp"

namespace hpvpinn::oracle {

/// Composite trapezoid rule with n >= 10 panels.
double dense_integral(const std::function<double(double)>& f, double a, double b, int n);

/// Central differences per component, h in [1e-7, 1e-3].
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& loss, const Eigen::VectorXd& params,
                            double h);

/// Solution on a uniform (t, x) grid, stored t-major.
struct SpaceTimeGrid {
  double t0 = 0.0, t1 = 1.0;
  double x0 = -1.0, x1 = 1.0;
  int nt = 0, nx = 0;
  std::vector<double> values;

  double at(int it, int ix) const { return values[static_cast<std::size_t>(it) * nx + ix]; }
  double t(int it) const { return t0 + (t1 - t0) * it / (nt - 1); }
  double x(int ix) const { return x0 + (x1 - x0) * ix / (nx - 1); }
  /// Bilinear interpolation; the point must lie in the grid rectangle.
  double operator()(double t, double x) const;
  /// CSV with header t,x,u, writing every `stride`-th node along both axes.
  void write_csv(std::ostream& os, int stride = 1) const;
};

/// u_t + v u_x = kappa u_xx on [-1,1] x [0,1], u(+-1,t) = 0, u(x,0) = -sin(pi x), by
/// Crank-Nicolson with central differences; nx, nt >= 100 nodes.
SpaceTimeGrid ade_reference(double v, double kappa, int nx, int nt);

/// Nodal solution on a uniform grid covering the bounding box of a decomposition.
struct PlanarGrid {
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> values;  ///< y-major; NaN outside the domain
  std::vector<bool> inside;
  double residual = 0.0;       ///< max-norm residual of the discrete system

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  /// Bilinear interpolation inside the domain.
  double operator()(double x, double y) const;
  void write_csv(std::ostream& os, int stride = 1) const;
};

/// 5-point Laplace solve with Dirichlet data on the boundary of a union of rectangles whose
/// edges lie on the grid; `n` nodes-per-unit-length spacing, n >= 64.
PlanarGrid laplace_reference(const Decomposition2D& decomposition, const std::function<double(double, double)>& boundary,
                             int n);

/// Discrete Fourier magnitudes |c_k| = |(1/N) sum_j u_j exp(-2 pi i k j / N)| for k = 0..N/2,
/// N >= 64 uniform samples over one period window.
std::vector<double> spectrum(const std::vector<double>& samples);

}  // namespace hpvpinn::oracle
