#include "hpvpinn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

Decomposition1D::Decomposition1D(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
  HPVPINN_EXPECTS(boundaries_.size() >= 2, "a decomposition needs at least one element");
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    HPVPINN_EXPECTS(boundaries_[i] > boundaries_[i - 1], "element boundaries must be strictly increasing");
  for (double b : boundaries_) HPVPINN_EXPECTS(std::isfinite(b), "element boundaries must be finite");
}

Interval Decomposition1D::element(int e) const {
  HPVPINN_EXPECTS(e >= 0 && e < elements(), "element index out of range");
  return {boundaries_[static_cast<std::size_t>(e)], boundaries_[static_cast<std::size_t>(e) + 1]};
}

Decomposition1D uniform_partition(double a, double b, int n_el) {
  HPVPINN_EXPECTS(n_el >= 1, "need at least one element");
  HPVPINN_EXPECTS(a < b, "domain must satisfy a < b");
  std::vector<double> x(static_cast<std::size_t>(n_el) + 1);
  for (int i = 0; i <= n_el; ++i) x[static_cast<std::size_t>(i)] = a + (b - a) * i / n_el;
  x.back() = b;
  return Decomposition1D(std::move(x));
}

Decomposition1D explicit_partition(std::vector<double> boundaries) { return Decomposition1D(std::move(boundaries)); }

double Segment::length() const noexcept { return std::hypot(to[0] - from[0], to[1] - from[1]); }

Decomposition2D::Decomposition2D(Decomposition1D x, Decomposition1D y) : x_(std::move(x)), y_(std::move(y)) {
  for (int ex = 0; ex < x_.elements(); ++ex)
    for (int ey = 0; ey < y_.elements(); ++ey) active_.push_back({ex, ey});
}

Decomposition2D::Decomposition2D(Decomposition1D x, Decomposition1D y, std::vector<ElementIndex2D> active)
    : x_(std::move(x)), y_(std::move(y)), active_(std::move(active)) {
  HPVPINN_EXPECTS(!active_.empty(), "active element set must be nonempty");
  std::sort(active_.begin(), active_.end());
  HPVPINN_EXPECTS(std::adjacent_find(active_.begin(), active_.end()) == active_.end(),
                  "active elements must be distinct");
  for (const auto& idx : active_)
    HPVPINN_EXPECTS(idx.ex >= 0 && idx.ex < x_.elements() && idx.ey >= 0 && idx.ey < y_.elements(),
                    "active element index out of range");
}

Rect Decomposition2D::element(int i) const {
  HPVPINN_EXPECTS(i >= 0 && i < elements(), "element index out of range");
  const auto& idx = active_[static_cast<std::size_t>(i)];
  return {x_.element(idx.ex), y_.element(idx.ey)};
}

bool Decomposition2D::is_active(ElementIndex2D idx) const {
  return std::binary_search(active_.begin(), active_.end(), idx);
}

double Decomposition2D::measure() const {
  double total = 0.0;
  for (int i = 0; i < elements(); ++i) total += element(i).area();
  return total;
}

bool Decomposition2D::contains(double px, double py) const {
  for (int i = 0; i < elements(); ++i) {
    const Rect r = element(i);
    if (r.x.contains(px) && r.y.contains(py)) return true;
  }
  return false;
}

std::vector<Segment> Decomposition2D::outer_boundary() const {
  // Unit edges on the grid lines, keyed by (grid vertex from, grid vertex to), oriented so
  // the active cell lies on the left.
  using Vertex = std::pair<int, int>;
  std::map<Vertex, Vertex> next;
  auto add = [&](Vertex a, Vertex b) { next[a] = b; };
  for (const auto& c : active_) {
    if (!is_active({c.ex, c.ey - 1})) add({c.ex, c.ey}, {c.ex + 1, c.ey});              // bottom
    if (!is_active({c.ex + 1, c.ey})) add({c.ex + 1, c.ey}, {c.ex + 1, c.ey + 1});      // right
    if (!is_active({c.ex, c.ey + 1})) add({c.ex + 1, c.ey + 1}, {c.ex, c.ey + 1});      // top
    if (!is_active({c.ex - 1, c.ey})) add({c.ex, c.ey + 1}, {c.ex, c.ey});              // left
  }
  const auto& xs = x_.boundaries();
  const auto& ys = y_.boundaries();
  auto coord = [&](Vertex v) {
    return std::array<double, 2>{xs[static_cast<std::size_t>(v.first)], ys[static_cast<std::size_t>(v.second)]};
  };

  std::vector<Segment> out;
  // Walk each loop starting from its lowest-left vertex, merging collinear unit edges.
  while (!next.empty()) {
    Vertex start = next.begin()->first;
    for (const auto& [a, b] : next)
      if (a.second < start.second || (a.second == start.second && a.first < start.first)) start = a;
    std::vector<Vertex> loop{start};
    Vertex cur = start;
    while (true) {
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
      next.erase(it);
      if (cur == start) break;
      loop.push_back(cur);
    }
    // Keep only corner vertices.
    std::vector<Vertex> corners;
    const std::size_t m = loop.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vertex& p = loop[(i + m - 1) % m];
      const Vertex& q = loop[i];
      const Vertex& r = loop[(i + 1) % m];
      const int cross = (q.first - p.first) * (r.second - q.second) - (q.second - p.second) * (r.first - q.first);
      if (cross != 0) corners.push_back(q);
    }
    for (std::size_t i = 0; i < corners.size(); ++i)
      out.push_back({coord(corners[i]), coord(corners[(i + 1) % corners.size()])});
  }
  return out;
}

Decomposition2D rectangular_partition(Decomposition1D x, Decomposition1D y) {
  return Decomposition2D(std::move(x), std::move(y));
}

Decomposition2D lshape_partition(bool fine) {
  if (!fine) {
    return Decomposition2D(explicit_partition({-1.0, 0.0, 1.0}), explicit_partition({-1.0, 0.0, 1.0}),
                           {{0, 0}, {0, 1}, {1, 1}});
  }
  auto xs = explicit_partition({-1.0, -0.5, -0.25, -0.125, -0.0625, 0.0, 1.0});
  auto ys = explicit_partition({-1.0, 0.0, 0.0625, 0.125, 0.25, 0.5, 1.0});
  std::vector<ElementIndex2D> active;
  for (int ex = 0; ex < xs.elements(); ++ex)
    for (int ey = 0; ey < ys.elements(); ++ey) {
      const bool excluded = ex == xs.elements() - 1 && ey == 0;  // (0,1) x (-1,0)
      if (!excluded) active.push_back({ex, ey});
    }
  return Decomposition2D(std::move(xs), std::move(ys), std::move(active));
}

std::vector<std::array<double, 2>> sample_boundary(const std::vector<Segment>& segments, int count) {
  HPVPINN_EXPECTS(count >= 0, "boundary point count must be non-negative");
  std::vector<std::array<double, 2>> pts;
  if (count == 0) return pts;
  HPVPINN_EXPECTS(!segments.empty(), "no boundary segments to sample");
  const double total = std::accumulate(segments.begin(), segments.end(), 0.0,
                                       [](double s, const Segment& seg) { return s + seg.length(); });
  const double spacing = total / count;
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (int i = 0; i < count; ++i) {
    const double s = (i + 0.5) * spacing;
    while (seg + 1 < segments.size() && s > seg_start + segments[seg].length()) {
      seg_start += segments[seg].length();
      ++seg;
    }
    const auto& g = segments[seg];
    const double t = std::clamp((s - seg_start) / g.length(), 0.0, 1.0);
    pts.push_back({g.from[0] + t * (g.to[0] - g.from[0]), g.from[1] + t * (g.to[1] - g.from[1])});
  }
  return pts;
}

}  // namespace hpvpinn
