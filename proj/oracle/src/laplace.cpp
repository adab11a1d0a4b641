#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Sparse>

#include "hpvpinn/error.hpp"
#include "hpvpinn/oracle.hpp"

namespace hpvpinn::oracle {

namespace {

int grid_index(double p, double origin, int n) {
  const double u = (p - origin) * n;
  const double r = std::round(u);
  HPVPINN_EXPECTS(std::abs(u - r) < 1e-9, "decomposition edges must lie on the reference grid");
  return static_cast<int>(r);
}

}  // namespace

double PlanarGrid::operator()(double x, double y) const {
  const double u = (x - x0) / h, w = (y - y0) / h;
  const int ix = std::clamp(static_cast<int>(std::floor(u)), 0, nx - 2);
  const int iy = std::clamp(static_cast<int>(std::floor(w)), 0, ny - 2);
  const double s = u - ix, r = w - iy;
  const double f00 = at(ix, iy), f10 = at(ix + 1, iy), f01 = at(ix, iy + 1), f11 = at(ix + 1, iy + 1);
  HPVPINN_EXPECTS(std::isfinite(f00 + f10 + f01 + f11), "point lies outside the reference domain");
  return (1 - s) * ((1 - r) * f00 + r * f01) + s * ((1 - r) * f10 + r * f11);
}

void PlanarGrid::write_csv(std::ostream& os, int stride) const {
  HPVPINN_EXPECTS(stride >= 1, "stride must be positive");
  os.precision(17);
  os << std::scientific << "x,y,u\n";
  for (int iy = 0; iy < ny; iy += stride) {
    for (int ix = 0; ix < nx; ix += stride) {
      if (!inside[static_cast<std::size_t>(iy) * nx + ix]) continue;
      os << x0 + h * ix << ',' << y0 + h * iy << ',' << at(ix, iy) << '\n';
    }
  }
}

PlanarGrid laplace_reference(const Decomposition2D& decomposition, const std::function<double(double, double)>& boundary,
                             int n) {
  HPVPINN_EXPECTS(n >= 64, "reference grid needs at least 64 nodes per unit length");
  HPVPINN_EXPECTS(static_cast<bool>(boundary), "Dirichlet data is required");
  const auto& bx = decomposition.x().boundaries();
  const auto& by = decomposition.y().boundaries();
  PlanarGrid g;
  g.x0 = bx.front();
  g.y0 = by.front();
  g.h = 1.0 / n;
  for (double b : bx) grid_index(b, g.x0, n);
  for (double b : by) grid_index(b, g.y0, n);
  g.nx = grid_index(bx.back(), g.x0, n) + 1;
  g.ny = grid_index(by.back(), g.y0, n) + 1;

  const auto total = static_cast<std::size_t>(g.nx) * g.ny;
  g.inside.assign(total, false);
  g.values.assign(total, std::numeric_limits<double>::quiet_NaN());
  auto idx = [&](int ix, int iy) { return static_cast<std::size_t>(iy) * g.nx + ix; };
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) g.inside[idx(ix, iy)] = decomposition.contains(g.x0 + g.h * ix, g.y0 + g.h * iy);
  }
  auto in = [&](int ix, int iy) { return ix >= 0 && iy >= 0 && ix < g.nx && iy < g.ny && g.inside[idx(ix, iy)]; };

  // a node is an unknown when its whole 3x3 neighbourhood is in the closed domain
  std::vector<int> unknown(total, -1);
  int m = 0, dirichlet = 0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!in(ix, iy)) continue;
      bool interior = true;
      for (int dy = -1; dy <= 1 && interior; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) interior = interior && in(ix + dx, iy + dy);
      }
      if (interior) {
        unknown[idx(ix, iy)] = m++;
      } else {
        g.values[idx(ix, iy)] = boundary(g.x0 + g.h * ix, g.y0 + g.h * iy);
        ++dirichlet;
      }
    }
  }
  HPVPINN_EXPECTS(dirichlet > 0, "the grid has no Dirichlet nodes");

  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const int row = unknown[idx(ix, iy)];
      if (row < 0) continue;
      entries.emplace_back(row, row, 4.0);
      for (int k = 0; k < 4; ++k) {
        const auto nb = idx(ix + dx[k], iy + dy[k]);
        if (unknown[nb] >= 0) {
          entries.emplace_back(row, unknown[nb], -1.0);
        } else {
          rhs(row) += g.values[nb];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
  HPVPINN_EXPECTS(solver.info() == Eigen::Success, "reference system could not be factorized");
  const Eigen::VectorXd u = solver.solve(rhs);
  g.residual = m > 0 ? (a * u - rhs).lpNorm<Eigen::Infinity>() : 0.0;

  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const int row = unknown[idx(ix, iy)];
      if (row >= 0) g.values[idx(ix, iy)] = u(row);
    }
  }
  return g;
}

}  // namespace hpvpinn::oracle
