#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "randpoly/types.hpp"

namespace randpoly::hull2d {

using P2 = Vec<2>;

inline double cross(const P2& o, const P2& a, const P2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Andrew's monotone chain. Returns the strict hull (collinear points dropped)
/// in counterclockwise order. Degenerate inputs give 1 or 2 points.
inline std::vector<P2> convex_hull(std::span<const P2> input) {
  std::vector<P2> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<P2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Signed shoelace area (positive for counterclockwise order).
inline double polygon_area(std::span<const P2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

inline double polygon_perimeter(std::span<const P2> poly) {
  double len = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) len += (poly[(i + 1) % n] - poly[i]).norm();
  return len;
}

/// Point in a counterclockwise convex polygon (boundary counts as inside).
inline bool contains(std::span<const P2> ccw, const P2& x, double eps = 0.0) {
  if (ccw.size() < 3) return false;
  for (std::size_t i = 0, n = ccw.size(); i < n; ++i) {
    const P2& a = ccw[i];
    const P2& b = ccw[(i + 1) % n];
    if (cross(a, b, x) < -eps * (b - a).norm()) return false;
  }
  return true;
}

/// Euclidean distance from x to a counterclockwise convex polygon (0 inside).
inline double distance(std::span<const P2> ccw, const P2& x) {
  if (contains(ccw, x)) return 0.0;
  double best = INFINITY;
  for (std::size_t i = 0, n = ccw.size(); i < n; ++i) {
    const P2& a = ccw[i];
    const P2& b = ccw[(i + 1) % n];
    const P2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (x - (a + s * ab)).norm());
  }
  return best;
}

/// Support function of conv(hull) at the m directions (cos 2πk/m, sin 2πk/m),
/// k = 0..m-1. `hull` must come from convex_hull(). The maximizing vertex
/// advances monotonically with the angle, so the sweep is O(m + |hull|).
inline void support_on_circle(std::span<const P2> hull, std::span<const P2> nodes, std::span<double> out) {
  const std::size_t h = hull.size();
  const std::size_t m = nodes.size();
  if (h == 0) {
    std::fill(out.begin(), out.end(), -INFINITY);
    return;
  }
  if (h < 3) {
    for (std::size_t k = 0; k < m; ++k) {
      double best = -INFINITY;
      for (const auto& p : hull) best = std::max(best, nodes[k].dot(p));
      out[k] = best;
    }
    return;
  }
  std::size_t j = 0;
  for (std::size_t i = 1; i < h; ++i) {
    if (nodes[0].dot(hull[i]) > nodes[0].dot(hull[j])) j = i;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const P2& u = nodes[k];
    double cur = u.dot(hull[j]);
    for (std::size_t step = 0; step < h; ++step) {
      const std::size_t nxt = (j + 1) % h;
      const double val = u.dot(hull[nxt]);
      if (val < cur) break;
      j = nxt;
      cur = val;
    }
    out[k] = cur;
  }
}

}  // namespace randpoly::hull2d
