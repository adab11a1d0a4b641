#include <doctest.h>

#include <cmath>
#include <set>

#include "hpvpinn/error.hpp"
#include "hpvpinn/mesh.hpp"

using namespace hpvpinn;

TEST_CASE("uniform partitions") {
  CHECK(uniform_partition(-1, 1, 1).boundaries() == std::vector<double>{-1, 1});
  CHECK(uniform_partition(-1, 1, 2).boundaries() == std::vector<double>{-1, 0, 1});
  const auto d = uniform_partition(-1, 1, 4);
  CHECK(d.elements() == 4);
  for (int e = 0; e < 4; ++e) CHECK(d.element(e).width() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_partition(-1, 1, 0), ContractViolation);
  CHECK_THROWS_AS(uniform_partition(1, -1, 2), ContractViolation);
}

TEST_CASE("explicit partitions") {
  const auto d = explicit_partition({-1, -0.2, 0.2, 1});
  CHECK(d.elements() == 3);
  CHECK(d.element(1).width() == doctest::Approx(0.4));
  CHECK(explicit_partition({-1, 1}).elements() == 1);
  CHECK(explicit_partition({-1, -0.05, 0.15, 1}).element(1).a == -0.05);
  CHECK(d.measure() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(explicit_partition({-1, 0.5, 0.2, 1}), ContractViolation);
  CHECK_THROWS_AS(explicit_partition({1}), ContractViolation);
}

TEST_CASE("rectangular decompositions cover the square") {
  const auto d = rectangular_partition(uniform_partition(-1, 1, 3), uniform_partition(-1, 1, 2));
  CHECK(d.elements() == 6);
  double area = 0.0;
  for (int i = 0; i < d.elements(); ++i) area += d.element(i).area();
  CHECK(std::abs(area - 4.0) <= 1e-13);
  CHECK(std::abs(d.measure() - 4.0) <= 1e-13);
  const auto boundary = d.outer_boundary();
  CHECK(boundary.size() == 4);
  double perimeter = 0.0;
  for (const auto& s : boundary) perimeter += s.length();
  CHECK(perimeter == doctest::Approx(8.0));
}

TEST_CASE("coarse L-shape") {
  const auto d = lshape_partition(false);
  CHECK(d.elements() == 3);
  CHECK(std::abs(d.measure() - 3.0) <= 1e-13);
  CHECK(d.contains(-0.5, -0.5));
  CHECK(d.contains(0.5, 0.5));
  CHECK_FALSE(d.contains(0.5, -0.5));
  CHECK(d.contains(0.0, -0.5));
  const auto boundary = d.outer_boundary();
  CHECK(boundary.size() == 6);
  double perimeter = 0.0;
  for (const auto& s : boundary) perimeter += s.length();
  CHECK(perimeter == doctest::Approx(8.0));
}

TEST_CASE("fine L-shape") {
  const auto d = lshape_partition(true);
  CHECK(d.elements() == 35);
  double area = 0.0;
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < d.elements(); ++i) area += d.element(i).area();
  for (const auto& idx : d.active()) CHECK(seen.insert({idx.ex, idx.ey}).second);
  CHECK(std::abs(area - 3.0) <= 1e-13);
  CHECK_FALSE(d.contains(0.01, -0.01));
  // graded toward the corner: the smallest element touches the origin
  double smallest = 10.0;
  for (int i = 0; i < d.elements(); ++i) smallest = std::min(smallest, d.element(i).area());
  CHECK(smallest == doctest::Approx(1.0 / 256.0));
  // symmetric under (x, y) -> (-y, -x)
  for (int i = 0; i < d.elements(); ++i) {
    const Rect r = d.element(i);
    const double cx = 0.5 * (r.x.a + r.x.b), cy = 0.5 * (r.y.a + r.y.b);
    CHECK(d.contains(-cy, -cx));
  }
}

TEST_CASE("boundary sampling") {
  const auto d = lshape_partition(false);
  const auto pts = sample_boundary(d.outer_boundary(), 80);
  CHECK(pts.size() == 80);
  for (const auto& p : pts) {
    CHECK(d.contains(p[0], p[1]));
    const bool on_edge = std::abs(std::abs(p[0]) - 1.0) < 1e-12 || std::abs(std::abs(p[1]) - 1.0) < 1e-12 ||
                         (std::abs(p[0]) < 1e-12 && p[1] <= 0.0) || (std::abs(p[1]) < 1e-12 && p[0] >= 0.0);
    CHECK(on_edge);
  }
  CHECK(sample_boundary(d.outer_boundary(), 0).empty());
}
