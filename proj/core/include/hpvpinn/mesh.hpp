#pragma once

#include <array>
#include <vector>

namespace hpvpinn {

struct Interval {
  double a = -1.0;
  double b = 1.0;

  double width() const noexcept { return b - a; }
  bool contains(double x) const noexcept { return x >= a && x <= b; }
};

/// Strictly increasing element boundaries x_0 < x_1 < ... < x_N.
class Decomposition1D {
 public:
  explicit Decomposition1D(std::vector<double> boundaries);

  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  int elements() const noexcept { return static_cast<int>(boundaries_.size()) - 1; }
  Interval element(int e) const;
  Interval domain() const noexcept { return {boundaries_.front(), boundaries_.back()}; }
  double measure() const noexcept { return boundaries_.back() - boundaries_.front(); }

 private:
  std::vector<double> boundaries_;
};

Decomposition1D uniform_partition(double a, double b, int n_el);
Decomposition1D explicit_partition(std::vector<double> boundaries);

struct Rect {
  Interval x;
  Interval y;

  double area() const noexcept { return x.width() * y.width(); }
};

struct ElementIndex2D {
  int ex = 0;
  int ey = 0;

  friend bool operator==(const ElementIndex2D&, const ElementIndex2D&) = default;
  friend auto operator<=>(const ElementIndex2D&, const ElementIndex2D&) = default;
};

/// Straight boundary piece from `from` to `to`.
struct Segment {
  std::array<double, 2> from;
  std::array<double, 2> to;

  double length() const noexcept;
};

/// Structured grid of rectangles, of which a nonempty subset is active.
class Decomposition2D {
 public:
  /// All cells active.
  Decomposition2D(Decomposition1D x, Decomposition1D y);
  Decomposition2D(Decomposition1D x, Decomposition1D y, std::vector<ElementIndex2D> active);

  const Decomposition1D& x() const noexcept { return x_; }
  const Decomposition1D& y() const noexcept { return y_; }
  const std::vector<ElementIndex2D>& active() const noexcept { return active_; }
  int elements() const noexcept { return static_cast<int>(active_.size()); }
  Rect element(int i) const;
  bool is_active(ElementIndex2D idx) const;
  double measure() const;

  /// True if the point lies in the closure of some active element.
  bool contains(double px, double py) const;

  /// Edges of active cells not shared with another active cell, merged into maximal
  /// straight runs, ordered counter-clockwise when the domain is simply connected.
  std::vector<Segment> outer_boundary() const;

 private:
  Decomposition1D x_;
  Decomposition1D y_;
  std::vector<ElementIndex2D> active_;
};

Decomposition2D rectangular_partition(Decomposition1D x, Decomposition1D y);

/// L-shaped domain [-1,1]^2 minus (0,1)x(-1,0), reentrant corner at the origin.
///
/// coarse: the three unit squares.
/// fine: 35 rectangles graded by halving toward the corner. The grid is
/// x = {-1,-1/2,-1/4,-1/8,-1/16,0,1} and y = {-1,0,1/16,1/8,1/4,1/2,1}, which is mapped onto
/// itself by the reflection (x, y) -> (-y, -x) that preserves the L.
Decomposition2D lshape_partition(bool fine);

/// `count` points spaced evenly by arc length along the segments (half a spacing offset
/// from the start so that corners are not double counted).
std::vector<std::array<double, 2>> sample_boundary(const std::vector<Segment>& segments, int count);

}  // namespace hpvpinn
