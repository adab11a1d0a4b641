#include "hpvpinn/basis.hpp"

#include <cmath>
#include <string>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

LegendreValues legendre_upto(int n, double xi) {
  HPVPINN_EXPECTS(n >= 0, "Legendre degree must be non-negative");
  LegendreValues out{Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1)};
  out.p[0] = 1.0;
  if (n >= 1) {
    out.p[1] = xi;
    out.dp[1] = 1.0;
  }
  for (int k = 1; k < n; ++k) {
    out.p[k + 1] = ((2.0 * k + 1.0) * xi * out.p[k] - k * out.p[k - 1]) / (k + 1.0);
    out.dp[k + 1] = out.dp[k - 1] + (2.0 * k + 1.0) * out.p[k];
    out.ddp[k + 1] = out.ddp[k - 1] + (2.0 * k + 1.0) * out.dp[k];
  }
  return out;
}

double legendre(int k, double xi, int order) {
  HPVPINN_EXPECTS(k >= 0, "Legendre degree must be non-negative");
  HPVPINN_EXPECTS(order >= 0 && order <= 2, "derivative order must be 0, 1 or 2");
  HPVPINN_EXPECTS(std::abs(xi) <= 1.0 + 1e-12, "reference coordinate outside [-1, 1]");
  const auto v = legendre_upto(k, xi);
  return order == 0 ? v.p[k] : (order == 1 ? v.dp[k] : v.ddp[k]);
}

std::string_view to_string(BasisKind kind) {
  return kind == BasisKind::legendre_raw ? "legendre_raw" : "compact_poisson";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "legendre_raw") return BasisKind::legendre_raw;
  if (name == "compact_poisson") return BasisKind::compact_poisson;
  throw ContractViolation("unknown test basis '" + std::string(name) + "'");
}

namespace {

int max_degree(const TestBasis& b) { return b.kind == BasisKind::legendre_raw ? b.count - 1 : b.count + 1; }

void fill(const TestBasis& b, const LegendreValues& lv, Eigen::Index col, BasisTable& t) {
  for (int k = 1; k <= b.count; ++k) {
    if (b.kind == BasisKind::legendre_raw) {
      t.v(k - 1, col) = lv.p[k - 1];
      t.dv(k - 1, col) = lv.dp[k - 1];
      t.ddv(k - 1, col) = lv.ddp[k - 1];
    } else {
      t.v(k - 1, col) = lv.p[k + 1] - lv.p[k - 1];
      t.dv(k - 1, col) = lv.dp[k + 1] - lv.dp[k - 1];
      t.ddv(k - 1, col) = lv.ddp[k + 1] - lv.ddp[k - 1];
    }
  }
}

}  // namespace

double test_fn(const TestBasis& basis, int k, double xi, int order) {
  HPVPINN_EXPECTS(basis.count >= 1, "test basis must hold at least one function");
  HPVPINN_EXPECTS(k >= 1 && k <= basis.count, "test function index out of range");
  HPVPINN_EXPECTS(order >= 0 && order <= 2, "derivative order must be 0, 1 or 2");
  HPVPINN_EXPECTS(std::abs(xi) <= 1.0 + 1e-12, "reference coordinate outside [-1, 1]");
  // Exact endpoint values: P_n(1) = 1 and P_n(-1) = (-1)^n cancel in the difference.
  if (basis.kind == BasisKind::compact_poisson && order == 0 && std::abs(xi) == 1.0) return 0.0;
  const auto lv = legendre_upto(max_degree(basis), xi);
  const auto& src = order == 0 ? lv.p : (order == 1 ? lv.dp : lv.ddp);
  if (basis.kind == BasisKind::legendre_raw) return src[k - 1];
  return src[k + 1] - src[k - 1];
}

BasisTable tabulate(const TestBasis& basis, std::span<const double> xi) {
  HPVPINN_EXPECTS(basis.count >= 1, "test basis must hold at least one function");
  const auto n = static_cast<Eigen::Index>(xi.size());
  BasisTable t{Eigen::MatrixXd(basis.count, n), Eigen::MatrixXd(basis.count, n), Eigen::MatrixXd(basis.count, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    HPVPINN_EXPECTS(std::abs(xi[j]) <= 1.0 + 1e-12, "reference coordinate outside [-1, 1]");
    fill(basis, legendre_upto(max_degree(basis), xi[j]), j, t);
    if (basis.kind == BasisKind::compact_poisson && std::abs(xi[j]) == 1.0) t.v.col(j).setZero();
  }
  return t;
}

}  // namespace hpvpinn
