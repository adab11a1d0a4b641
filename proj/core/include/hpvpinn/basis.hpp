#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace hpvpinn {

/// d^order/dxi^order P_k(xi) via the Bonnet recurrence. order in {0,1,2}.
double legendre(int k, double xi, int order = 0);

/// Values and derivatives of P_0..P_n at xi. Derivatives use
/// P'_{k+1} = P'_{k-1} + (2k+1) P_k, which stays exact at xi = +-1.
struct LegendreValues {
  Eigen::VectorXd p, dp, ddp;
};
LegendreValues legendre_upto(int n, double xi);

enum class BasisKind {
  legendre_raw,    ///< v_k = P_{k-1}
  compact_poisson  ///< phi_k = P_{k+1} - P_{k-1}, zero at xi = +-1
};

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

struct TestBasis {
  BasisKind kind = BasisKind::compact_poisson;
  int count = 1;
};

/// k-th test function (1-based) on the reference interval.
double test_fn(const TestBasis& basis, int k, double xi, int order = 0);

/// All test functions at a set of reference points: rows = k-1, columns = point.
struct BasisTable {
  Eigen::MatrixXd v, dv, ddv;
};
BasisTable tabulate(const TestBasis& basis, std::span<const double> xi);

}  // namespace hpvpinn
