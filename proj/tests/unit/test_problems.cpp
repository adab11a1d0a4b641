#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hpvpinn/error.hpp"
#include "hpvpinn/problems.hpp"

using namespace hpvpinn;
using std::numbers::pi;

namespace {

double at1(const ScalarField& f, double x) { return f(std::array{x}); }
double at2(const ScalarField& f, double x, double y) { return f(std::array{x, y}); }

// Pointwise residual of the exact solution from its own jet.
double strong_defect(const ProblemSpec& p, std::span<const double> x) {
  const JetValue j = p.exact(x);
  switch (p.kind) {
    case ProblemKind::poisson1d: return -j.d2_dx2[0] - p.forcing(x);
    case ProblemKind::poisson2d: return j.d2_dx2[0] + j.d2_dx2[1] - p.forcing(x);
    default: return 0.0;
  }
}

}  // namespace

TEST_CASE("registry contents") {
  std::set<std::string> names;
  for (const auto& p : registry()) names.insert(p.name);
  for (const char* n : {"approx_smooth", "approx_jump", "approx_oob", "poisson1d_steep", "poisson1d_bl",
                        "poisson1d_asym", "poisson2d_harmonic", "poisson2d_steep", "poisson2d_lshape", "ade_forward",
                        "ade_inverse"}) {
    CHECK(names.count(n) == 1);
  }
  CHECK(names.size() == registry().size());
  CHECK_THROWS_AS(find_problem("poisson3d"), UnknownProblemError);
}

TEST_CASE("closed-form values") {
  CHECK(find_problem("poisson1d_steep").exact_value(std::array{0.0}) == 0.0);
  CHECK(find_problem("poisson1d_bl").exact_value(std::array{-1.0}) == doctest::Approx(2.718281828459045).epsilon(1e-14));
  CHECK(find_problem("poisson2d_harmonic").exact_value(std::array{-1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));

  const auto& smooth = find_problem("approx_smooth");
  CHECK(at1(smooth.target, 0.3) == doctest::Approx(0.1 * std::sin(4 * pi * 0.3) + std::tanh(6.0)).epsilon(1e-14));
  const auto& asym = find_problem("poisson1d_asym");
  CHECK(asym.exact_value(std::array{-0.1}) == doctest::Approx(0.1 * std::sin(-0.8 * pi)).epsilon(1e-14));
  const auto& steep2d = find_problem("poisson2d_steep");
  CHECK(steep2d.exact_value(std::array{0.2, 0.1}) ==
        doctest::Approx((0.1 * std::sin(0.4 * pi) + std::tanh(2.0)) * std::sin(0.2 * pi)).epsilon(1e-14));

  const auto& oob = find_problem("approx_oob");
  CHECK(oob.range_0 == std::array{-0.2, 0.2});
  CHECK(at1(oob.target, 0.05) == doctest::Approx(std::sin(0.4 * pi)).epsilon(1e-14));
}

TEST_CASE("jump target") {
  const auto& p = find_problem("approx_jump");
  REQUIRE(p.breakpoints == std::vector<double>{0.0});
  const double left = at1(p.target, std::nextafter(0.0, -1.0)), right = at1(p.target, 0.0);
  CHECK(right - left == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(at1(p.target, -0.3) == doctest::Approx(2 * std::sin(-1.2 * pi)).epsilon(1e-14));
  CHECK(at1(p.target, 0.3) == doctest::Approx(6 + std::exp(0.36) * std::sin(3.6 * pi)).epsilon(1e-14));
}

TEST_CASE("manufactured consistency") {
  std::mt19937_64 rng(2024);
  for (const auto& p : registry()) {
    if (!p.has_exact() || !p.forcing || p.kind == ProblemKind::approx) continue;
    CAPTURE(p.name);
    std::uniform_real_distribution<double> u0(p.range_0[0], p.range_0[1]), u1(p.range_1[0], p.range_1[1]);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      std::array<double, 2> x{u0(rng), u1(rng)};
      if (p.lshape && x[0] > 0 && x[1] < 0) continue;
      const double d = strong_defect(p, std::span<const double>(x.data(), p.dim));
      const double scale = std::max(1.0, std::abs(p.forcing(std::span<const double>(x.data(), p.dim))));
      worst = std::max(worst, std::abs(d) / scale);
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("forcings agree with exact second derivatives at machine precision") {
  for (const char* name : {"poisson1d_steep", "poisson1d_bl", "poisson1d_asym"}) {
    const auto& p = find_problem(name);
    for (double x : {-0.95, -0.3, -0.011, 0.0, 0.004, 0.5, 0.99}) {
      const double expected = -p.exact(std::array{x}).d2_dx2[0];
      CHECK(at1(p.forcing, x) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }
  const auto& s = find_problem("poisson2d_steep");
  for (double x : {-0.7, 0.0, 0.05, 0.6}) {
    for (double y : {-0.9, 0.25, 0.8}) {
      const auto j = s.exact(std::array{x, y});
      CHECK(at2(s.forcing, x, y) == doctest::Approx(j.d2_dx2[0] + j.d2_dx2[1]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("boundary consistency") {
  for (const char* name : {"poisson1d_steep", "poisson1d_asym", "poisson1d_bl"}) {
    const auto& p = find_problem(name);
    for (double x : {-1.0, 1.0}) CHECK(std::abs(at1(p.boundary, x) - p.exact_value(std::array{x})) <= 1e-9);
  }
  const auto& bl = find_problem("poisson1d_bl");
  CHECK(at1(bl.boundary, -1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(at1(bl.boundary, 1.0) == doctest::Approx(0.1 * std::sin(5 * pi) + std::exp(-199.0)).epsilon(1e-12).scale(1e-12));

  for (const char* name : {"poisson2d_harmonic", "poisson2d_steep"}) {
    const auto& p = find_problem(name);
    for (double t : {-1.0, -0.4, 0.3, 1.0}) {
      for (auto pt : {std::array{t, -1.0}, std::array{t, 1.0}, std::array{-1.0, t}, std::array{1.0, t}})
        CHECK(std::abs(p.boundary(pt) - p.exact_value(pt)) <= 1e-9);
    }
  }

  const auto& ade = find_problem("ade_forward");
  CHECK(ade.velocity == 1.0);
  CHECK(ade.kappa == doctest::Approx(0.1 / pi).epsilon(1e-15));
  for (double x : {-0.7, 0.0, 0.5}) CHECK(at2(ade.initial, 0.0, x) == doctest::Approx(-std::sin(pi * x)).epsilon(1e-15));
  CHECK(at2(ade.boundary, 0.4, -1.0) == 0.0);
  CHECK(at2(ade.boundary, 0.4, 1.0) == 0.0);
}

TEST_CASE("L-shaped domain data") {
  const auto& p = find_problem("poisson2d_lshape");
  CHECK(p.lshape);
  CHECK(at2(p.forcing, 0.3, 0.4) == 0.0);
  CHECK(lshape_harmonic(0.0, 0.0) == 0.0);
  CHECK(lshape_harmonic(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  // the polar angle runs over [0, 2pi) so the reentrant edge (x>0, y<0) sits at angle 3pi/2
  CHECK(lshape_harmonic(0.0, -1.0) == doctest::Approx(std::cos(pi)).epsilon(1e-14));
  CHECK(lshape_harmonic(0.0, 1.0) == doctest::Approx(std::cos(pi / 3)).epsilon(1e-14));
  // harmonic: five-point Laplacian away from the corner
  const double h = 1e-3;
  for (auto [x, y] : {std::pair{-0.5, 0.5}, std::pair{-0.3, -0.6}, std::pair{0.4, 0.7}}) {
    const double lap = (lshape_harmonic(x + h, y) + lshape_harmonic(x - h, y) + lshape_harmonic(x, y + h) +
                        lshape_harmonic(x, y - h) - 4 * lshape_harmonic(x, y)) /
                       (h * h);
    CHECK(std::abs(lap) <= 1e-4);
  }
  CHECK(at2(p.boundary, -1.0, 0.3) == doctest::Approx(lshape_harmonic(-1.0, 0.3)).epsilon(1e-15));
}

TEST_CASE("defaults") {
  const auto& steep = find_problem("poisson1d_steep");
  CHECK(steep.defaults.weights.tau_b == 1.0);
  CHECK(steep.defaults.activation == Activation::sine);
  const auto& h2 = find_problem("poisson2d_harmonic");
  CHECK(h2.defaults.n_b == 80);
  CHECK(h2.defaults.weights.tau_b == 10.0);
  const auto& inv = find_problem("ade_inverse");
  CHECK(inv.defaults.sensors == std::vector<double>{-0.5, 0.0, 0.5});
  CHECK(inv.defaults.per_sensor == 5);
  CHECK(inv.defaults.kappa_initial == 1.0);
  CHECK(inv.defaults.weights.tau_star == 10.0);
  CHECK(find_problem("approx_smooth").defaults.basis == BasisKind::legendre_raw);
}

TEST_CASE("inverse observations") {
  ProblemSpec p = find_problem("ade_inverse");
  p.reference = [](std::span<const double> tx) { return tx[0] + 10.0 * tx[1]; };
  const auto& d = p.defaults;
  const auto a = observations_for_inverse(p, d.sensors, d.per_sensor, 11);
  const auto b = observations_for_inverse(p, d.sensors, d.per_sensor, 11);
  const auto c = observations_for_inverse(p, d.sensors, d.per_sensor, 12);
  REQUIRE(a.size() == 15);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].point[0] > 0.0);
    CHECK(a[i].point[0] <= 1.0);
    CHECK(a[i].value == a[i].point[0] + 10.0 * a[i].point[1]);
    differs = differs || a[i].point != c[i].point;
  }
  CHECK(differs);
  int at_sensor = 0;
  for (const auto& o : a) at_sensor += o.point[1] == 0.0;
  CHECK(at_sensor == 5);

  CHECK(observations_for_inverse(p, d.sensors, 0, 1).empty());
  CHECK_THROWS_AS(observations_for_inverse(p, std::vector<double>{1.5}, 5, 1), ContractViolation);
  ProblemSpec no_ref = find_problem("ade_inverse");
  CHECK_THROWS_AS(observations_for_inverse(no_ref, d.sensors, 5, 1), ContractViolation);
}

TEST_CASE("space-time decompositions") {
  const auto& p = find_problem("ade_forward");
  const auto dec = decomposition_2d(p, {0, 0.5, 1}, {-1, 0, 1});
  CHECK(dec.elements() == 4);
  CHECK(dec.measure() == doctest::Approx(2.0));
  const auto& l = find_problem("poisson2d_lshape");
  CHECK(decomposition_2d(l, {}, {}).measure() == doctest::Approx(3.0));
}
