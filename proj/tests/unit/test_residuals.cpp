#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hpvpinn/basis.hpp"
#include "hpvpinn/error.hpp"
#include "hpvpinn/problems.hpp"
#include "hpvpinn/quadrature.hpp"
#include "hpvpinn/residuals.hpp"
#include "test_support.hpp"

using namespace hpvpinn;
using std::numbers::pi;

namespace {

const ScalarField zero_f = [](std::span<const double>) { return 0.0; };
const ScalarField sin_f = [](std::span<const double> p) { return std::sin(pi * p[0]); };

QuadratureRule mapped(const QuadratureRule& r, Interval e) { return map_to_element(r, e.a, e.b); }

// 1D Poisson residuals by dense trapezoid integration of pointwise jets.
Eigen::VectorXd dense_poisson1d(VariationalForm form, const Mlp& net, Interval el, int count, const ScalarField& f) {
  const TestBasis b{BasisKind::compact_poisson, count};
  const double j = 2.0 / el.width();
  auto xi = [&](double x) { return std::clamp((2.0 * x - el.a - el.b) / el.width(), -1.0, 1.0); };
  Eigen::VectorXd r(count);
  for (int k = 1; k <= count; ++k) {
    const double force = oracle::dense_integral([&](double x) { return f(std::array{x}) * test_fn(b, k, xi(x)); }, el.a, el.b, 20000);
    double op = 0.0;
    switch (form) {
      case VariationalForm::R1:
        op = oracle::dense_integral(
            [&](double x) { return -evaluate_jet(net, std::array{x}).d2_dx2[0] * test_fn(b, k, xi(x)); }, el.a, el.b, 20000);
        break;
      case VariationalForm::R2:
        op = oracle::dense_integral(
            [&](double x) { return evaluate_jet(net, std::array{x}).d_dx[0] * j * test_fn(b, k, xi(x), 1); }, el.a, el.b,
            20000);
        break;
      case VariationalForm::R3:
        op = -oracle::dense_integral([&](double x) { return forward(net, std::array{x}) * j * j * test_fn(b, k, xi(x), 2); },
                                     el.a, el.b, 400000) +
             forward(net, std::array{el.b}) * j * test_fn(b, k, 1.0, 1) -
             forward(net, std::array{el.a}) * j * test_fn(b, k, -1.0, 1);
        break;
    }
    r(k - 1) = op - force;
  }
  return r;
}

}  // namespace

TEST_CASE("function approximation residuals") {
  const Mlp net = init_mlp({1, 10, 10, 1}, Activation::tanh, 3);
  const ScalarField own = [&](std::span<const double> p) { return forward(net, p); };
  const Interval el{-0.4, 0.7};
  const TestBasis raw{BasisKind::legendre_raw, 8};
  const Eigen::VectorXd r = vnn_residual(net, own, el, raw, mapped(gauss_legendre(20), el));
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-13);

  const Mlp zero({1, 3, 1}, Activation::tanh);
  const ScalarField p3 = [](std::span<const double> p) { return legendre(3, p[0]); };
  const Eigen::VectorXd r3 = vnn_residual(zero, p3, Interval{-1, 1}, raw, gauss_legendre(10));
  CHECK(std::abs(r3(3) + 2.0 / 7.0) <= 1e-12);
  CHECK(std::abs(r3(0)) <= 1e-14);
}

TEST_CASE("function approximation residual matches dense integration") {
  const Mlp net = init_mlp({1, 10, 10, 1}, Activation::tanh, 5);
  const Interval el{-1, 1};
  const TestBasis raw{BasisKind::legendre_raw, 5};
  const Eigen::VectorXd r = vnn_residual(net, sin_f, el, raw, gauss_legendre(40));
  for (int k = 1; k <= 5; ++k) {
    const double d = oracle::dense_integral(
        [&](double x) { return (forward(net, std::array{x}) - std::sin(pi * x)) * legendre(k - 1, x); }, -1, 1, 20000);
    CHECK(std::abs(r(k - 1) - d) <= 1e-8);
  }
}

TEST_CASE("discontinuous targets are integrated piecewise") {
  const auto& jump = find_problem("approx_jump");
  const Mlp zero({1, 3, 1}, Activation::tanh);
  const Interval el{-0.5, 0.5};
  const TestBasis raw{BasisKind::legendre_raw, 5};
  const std::array<double, 1> bp{0.0};
  const Eigen::VectorXd r = vnn_residual(zero, jump.target, el, raw, split_rule(gauss_legendre(40), el, bp));
  for (int k = 1; k <= 5; ++k) {
    auto g = [&](double x) { return -jump.target(std::array{x}) * legendre(k - 1, 2.0 * x); };
    const double d = oracle::dense_integral(g, -0.5, std::nextafter(0.0, -1.0), 20000) + oracle::dense_integral(g, 0.0, 0.5, 20000);
    CHECK(std::abs(r(k - 1) - d) <= 1e-6);
  }
}

TEST_CASE("non-finite data is reported") {
  const Mlp zero({1, 3, 1}, Activation::tanh);
  const ScalarField bad = [](std::span<const double> p) { return p[0] > 0.5 ? std::nan("") : 0.0; };
  CHECK_THROWS_AS(vnn_residual(zero, bad, Interval{-1, 1}, TestBasis{BasisKind::legendre_raw, 3}, gauss_legendre(10)),
                  EvaluationError);
}

TEST_CASE("1D poisson residuals of a zero problem vanish") {
  const Mlp zero({1, 4, 1}, Activation::sine);
  const TestBasis b{BasisKind::compact_poisson, 10};
  for (auto form : {VariationalForm::R1, VariationalForm::R2, VariationalForm::R3}) {
    CHECK(poisson1d_residual(form, zero, Interval{-1, 1}, b, gauss_lobatto(20), zero_f).isZero());
  }
  CHECK_THROWS_AS(poisson1d_residual(VariationalForm::R1, zero, Interval{-1, 1}, TestBasis{BasisKind::legendre_raw, 3},
                                     gauss_lobatto(20), zero_f),
                  ContractViolation);
}

TEST_CASE("1D forms agree for a seeded network") {
  const Mlp net = init_mlp({1, 20, 20, 20, 20, 1}, Activation::sine, 7);
  const auto& steep = find_problem("poisson1d_steep");
  const TestBasis b{BasisKind::compact_poisson, 60};
  for (Interval el : {Interval{-1, 1}, Interval{-0.1, 0.1}, Interval{0.1, 1}}) {
    const auto rule = mapped(gauss_lobatto(80), el);
    const auto r1 = poisson1d_residual(VariationalForm::R1, net, el, b, rule, steep.forcing);
    const auto r2 = poisson1d_residual(VariationalForm::R2, net, el, b, rule, steep.forcing);
    const auto r3 = poisson1d_residual(VariationalForm::R3, net, el, b, rule, steep.forcing);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((r2 - r3).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("IBP discrepancy shrinks as quadrature is refined") {
  const Mlp net = init_mlp({1, 20, 20, 1}, Activation::tanh, 12);
  const TestBasis b{BasisKind::compact_poisson, 15};
  const Interval el{-1, 1};
  double previous = 1e300;
  for (int q : {20, 40, 80}) {
    const auto r1 = poisson1d_residual(VariationalForm::R1, net, el, b, gauss_lobatto(q), zero_f);
    const auto r2 = poisson1d_residual(VariationalForm::R2, net, el, b, gauss_lobatto(q), zero_f);
    const double gap = (r1 - r2).cwiseAbs().maxCoeff();
    CHECK(gap <= std::max(previous, 1e-12));
    previous = gap;
  }
}

TEST_CASE("1D residuals match dense integration") {
  const Mlp net = init_mlp({1, 10, 10, 1}, Activation::tanh, 31);
  const Interval el{-0.3, 0.5};
  const TestBasis b{BasisKind::compact_poisson, 6};
  for (auto form : {VariationalForm::R1, VariationalForm::R2, VariationalForm::R3}) {
    const auto r = poisson1d_residual(form, net, el, b, mapped(gauss_lobatto(40), el), sin_f);
    const auto d = dense_poisson1d(form, net, el, 6, sin_f);
    CHECK((r - d).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("manufactured 1D solutions give vanishing residuals") {
  for (const char* name : {"poisson1d_steep", "poisson1d_bl", "poisson1d_asym"}) {
    const auto& p = find_problem(name);
    const FieldTrial exact(p.exact, 1);
    const TestBasis b{BasisKind::compact_poisson, 60};
    for (std::size_t e = 0; e + 1 < p.defaults.mesh_x.size(); ++e) {
      const Interval el{p.defaults.mesh_x[e], p.defaults.mesh_x[e + 1]};
      const auto r = poisson1d_residual(VariationalForm::R1, exact, el, b, mapped(gauss_lobatto(80), el), p.forcing);
      CHECK(r.norm() <= 1e-6);
    }
  }
}

TEST_CASE("ReLU cannot feed the first form") {
  const Mlp net = init_mlp({1, 5, 1}, Activation::relu, 1);
  const TestBasis b{BasisKind::compact_poisson, 5};
  CHECK_THROWS_AS(poisson1d_residual(VariationalForm::R1, net, Interval{-1, 1}, b, gauss_lobatto(10), zero_f),
                  CapabilityError);
  CHECK_NOTHROW(poisson1d_residual(VariationalForm::R3, net, Interval{-1, 1}, b, gauss_lobatto(10), zero_f));
}

TEST_CASE("residuals are linear in the trial function") {
  Mlp net = init_mlp({1, 8, 8, 1}, Activation::tanh, 2);
  Mlp scaled = net;
  const int last = net.affine_layers() - 1;
  scaled.weight(last) *= -2.5;
  scaled.bias(last) *= -2.5;
  const TestBasis b{BasisKind::compact_poisson, 10};
  for (auto form : {VariationalForm::R1, VariationalForm::R2, VariationalForm::R3}) {
    const auto r = poisson1d_residual(form, net, Interval{-1, 0.5}, b, mapped(gauss_lobatto(30), {-1, 0.5}), zero_f);
    const auto rs = poisson1d_residual(form, scaled, Interval{-1, 0.5}, b, mapped(gauss_lobatto(30), {-1, 0.5}), zero_f);
    CHECK((rs + 2.5 * r).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("2D residuals") {
  const TestBasis b5{BasisKind::compact_poisson, 5};
  const Rect el{{-1, 0}, {0, 1}};
  const auto rx = mapped(gauss_legendre(10), el.x), ry = mapped(gauss_legendre(10), el.y);

  SUBCASE("zero problem") {
    const Mlp zero({2, 5, 1}, Activation::tanh);
    const auto r = poisson2d_residual(VariationalForm::R1, zero, el, b5, b5, rx, ry, zero_f);
    CHECK(r.size() == 25);
    CHECK(r.isZero());
  }
  SUBCASE("harmonic exact solution") {
    const auto& p = find_problem("poisson2d_harmonic");
    const FieldTrial exact(p.exact, 2);
    const auto r = poisson2d_residual(VariationalForm::R1, exact, el, b5, b5, rx, ry, p.forcing);
    CHECK(r.norm() <= 1e-8);
  }
  SUBCASE("forms agree for a seeded network") {
    const auto& p = find_problem("poisson2d_steep");
    for (std::uint64_t seed : {1, 2, 3}) {
      const Mlp net = init_mlp({2, 5, 5, 5, 1}, Activation::tanh, seed);
      const auto r1 = poisson2d_residual(VariationalForm::R1, net, el, b5, b5, rx, ry, p.forcing);
      const auto r2 = poisson2d_residual(VariationalForm::R2, net, el, b5, b5, rx, ry, p.forcing);
      const auto r3 = poisson2d_residual(VariationalForm::R3, net, el, b5, b5, rx, ry, p.forcing);
      CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK((r1 - r3).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
  SUBCASE("flattening is row-major over (k1, k2)") {
    // u = x^2 / 2 has u_xx = 1, so R1_(k1,k2) = int phi_k1 int psi_k2 - F
    const JetField half_square = make_jet_field<2>([](const auto& p) { return 0.5 * p[0] * p[0]; });
    const FieldTrial trial(half_square, 2);
    const TestBasis bx{BasisKind::compact_poisson, 3}, by{BasisKind::compact_poisson, 4};
    const auto r = poisson2d_residual(VariationalForm::R1, trial, el, bx, by, rx, ry, zero_f);
    REQUIRE(r.size() == 12);
    auto mass = [](const TestBasis& b, int k, Interval e) {
      double s = 0.0;
      const auto q = map_to_element(gauss_legendre(10), e.a, e.b);
      for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * test_fn(b, k, (2 * q.nodes[i] - e.a - e.b) / e.width());
      return s;
    };
    for (int k1 = 1; k1 <= 3; ++k1) {
      for (int k2 = 1; k2 <= 4; ++k2) {
        CHECK(r((k1 - 1) * 4 + (k2 - 1)) == doctest::Approx(mass(bx, k1, el.x) * mass(by, k2, el.y)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("advection-diffusion residuals") {
  const TestBasis b5{BasisKind::compact_poisson, 5};
  const Rect el{{0, 0.5}, {-1, 0}};
  const auto rt = mapped(gauss_legendre(10), el.x), rx = mapped(gauss_legendre(10), el.y);
  const double kappa = 0.1 / pi;

  const Mlp zero({2, 5, 1}, Activation::tanh);
  CHECK(ade_residual(VariationalForm::R1, zero, el, b5, b5, rt, rx, 1.0, kappa).isZero());

  const JetField heat = make_jet_field<2>([kappa](const auto& p) { return exp(-kappa * pi * pi * p[0]) * sin(pi * p[1]); });
  const FieldTrial trial(heat, 2);
  CHECK(ade_residual(VariationalForm::R1, trial, el, b5, b5, rt, rx, 0.0, kappa).norm() <= 1e-8);
  CHECK(ade_residual(VariationalForm::R2, trial, el, b5, b5, rt, rx, 0.0, kappa).norm() <= 1e-8);

  for (std::uint64_t seed : {4, 5, 6}) {
    const Mlp net = init_mlp({2, 5, 5, 5, 1}, Activation::tanh, seed);
    const auto r1 = ade_residual(VariationalForm::R1, net, el, b5, b5, rt, rx, 1.0, kappa);
    const auto r2 = ade_residual(VariationalForm::R2, net, el, b5, b5, rt, rx, 1.0, kappa);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-6);
  }
  CHECK_THROWS_AS(ade_residual(VariationalForm::R3, zero, el, b5, b5, rt, rx, 1.0, kappa), ContractViolation);
}

TEST_CASE("strong residuals") {
  const auto& p = find_problem("poisson1d_steep");
  const FieldTrial exact(p.exact, 1);
  const Eigen::MatrixXd pts = testing::row_points({-0.9, -0.01, 0.0, 0.02, 0.5});
  Eigen::RowVectorXd f(pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) f(i) = p.forcing(std::array{pts(0, i)});
  const auto r = strong_residual(poisson1d_strong(p.forcing), exact.jets(pts, 2), f);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-8);
}
