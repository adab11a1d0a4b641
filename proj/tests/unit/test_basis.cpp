#include <doctest.h>

#include <cmath>
#include <vector>

#include "hpvpinn/basis.hpp"
#include "hpvpinn/error.hpp"
#include "hpvpinn/quadrature.hpp"

using namespace hpvpinn;

TEST_CASE("legendre closed forms") {
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    CHECK(legendre(0, x) == 1.0);
    CHECK(legendre(0, x, 1) == 0.0);
    CHECK(legendre(1, x) == doctest::Approx(x));
  }
  CHECK(legendre(2, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(legendre(3, 0.4, 1) == doctest::Approx(0.5 * (15 * 0.16 - 3)).epsilon(1e-14));
  CHECK(legendre(3, 0.4, 2) == doctest::Approx(15 * 0.4).epsilon(1e-14));
  CHECK_THROWS_AS(legendre(-1, 0.0), ContractViolation);
  CHECK_THROWS_AS(legendre(2, 1.1), ContractViolation);
}

TEST_CASE("endpoint derivative values are exact") {
  for (int n = 0; n <= 30; ++n) {
    const double d1 = n * (n + 1) / 2.0;
    const double d2 = (n - 1.0) * n * (n + 1.0) * (n + 2.0) / 8.0;
    CHECK(legendre(n, 1.0, 1) == doctest::Approx(d1).epsilon(1e-13));
    CHECK(legendre(n, 1.0, 2) == doctest::Approx(d2).epsilon(1e-13));
    CHECK(legendre(n, -1.0, 1) == doctest::Approx(n % 2 == 0 ? -d1 : d1).epsilon(1e-13));
  }
}

TEST_CASE("orthogonality") {
  const auto& q = gauss_legendre(25);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      double s = 0.0;
      for (std::size_t n = 0; n < q.size(); ++n) s += q.weights[n] * legendre(i, q.nodes[n]) * legendre(j, q.nodes[n]);
      const double expected = i == j ? 2.0 / (2 * i + 1) : 0.0;
      CHECK(std::abs(s - expected) <= 1e-13);
    }
  }
  const auto& q20 = gauss_legendre(20);
  double s = 0.0;
  for (std::size_t n = 0; n < q20.size(); ++n) s += q20.weights[n] * legendre(3, q20.nodes[n]) * legendre(5, q20.nodes[n]);
  CHECK(std::abs(s) <= 1e-14);
}

TEST_CASE("compact test functions vanish at the ends") {
  const TestBasis b{BasisKind::compact_poisson, 60};
  for (int k = 1; k <= 60; ++k) {
    CHECK(test_fn(b, k, -1.0) == 0.0);
    CHECK(test_fn(b, k, 1.0) == 0.0);
  }
  CHECK(test_fn(b, 1, 0.0) == doctest::Approx(-1.5));
  CHECK_THROWS_AS(test_fn(b, 61, 0.0), ContractViolation);
  CHECK_THROWS_AS(test_fn(b, 0, 0.0), ContractViolation);
}

TEST_CASE("raw legendre test functions") {
  const TestBasis b{BasisKind::legendre_raw, 5};
  for (double x : {-1.0, 0.2, 1.0}) CHECK(test_fn(b, 1, x) == 1.0);
  CHECK(test_fn(b, 4, 0.3) == doctest::Approx(legendre(3, 0.3)).epsilon(1e-15));
}

TEST_CASE("derivatives agree with finite differences") {
  const double h = 1e-5;
  for (auto kind : {BasisKind::legendre_raw, BasisKind::compact_poisson}) {
    const TestBasis b{kind, 20};
    for (int k = 1; k <= 20; ++k) {
      for (double x : {-0.9, -0.41, 0.0, 0.33, 0.87}) {
        const double fd1 = (test_fn(b, k, x + h) - test_fn(b, k, x - h)) / (2 * h);
        const double fd2 = (test_fn(b, k, x + h, 1) - test_fn(b, k, x - h, 1)) / (2 * h);
        CHECK(std::abs(test_fn(b, k, x, 1) - fd1) <= 1e-6 * std::max(1.0, std::abs(fd1)));
        CHECK(std::abs(test_fn(b, k, x, 2) - fd2) <= 1e-6 * std::max(1.0, std::abs(fd2)));
      }
    }
  }
}

TEST_CASE("tabulate matches pointwise evaluation") {
  const TestBasis b{BasisKind::compact_poisson, 7};
  const std::vector<double> xi{-1.0, -0.5, 0.1, 0.9, 1.0};
  const BasisTable t = tabulate(b, xi);
  REQUIRE(t.v.rows() == 7);
  REQUIRE(t.v.cols() == 5);
  for (int k = 1; k <= 7; ++k) {
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const auto c = static_cast<Eigen::Index>(j);
      CHECK(t.v(k - 1, c) == doctest::Approx(test_fn(b, k, xi[j])).epsilon(1e-14));
      CHECK(t.dv(k - 1, c) == doctest::Approx(test_fn(b, k, xi[j], 1)).epsilon(1e-14));
      CHECK(t.ddv(k - 1, c) == doctest::Approx(test_fn(b, k, xi[j], 2)).epsilon(1e-14));
    }
  }
}
