#include "memlme/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace memlme {
namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

std::vector<int> convex_hull(std::span<const Vec2> points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
    if (points[a].y() != points[b].y()) return points[a].y() < points[b].y();
    return a < b;
  });
  if (n < 3) return order;

  std::vector<int> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(points[hull[k - 2]], points[hull[k - 1]], points[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(points[hull[k - 2]], points[hull[k - 1]], points[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  hull.resize(std::max(k - 1, 1));
  return hull;
}

double hull_signed_distance(std::span<const Vec2> points, std::span<const int> hull, const Vec2& x) {
  double inside = std::numeric_limits<double>::infinity();
  const std::size_t h = hull.size();
  for (std::size_t i = 0; i < h; ++i) {
    const Vec2& a = points[hull[i]];
    const Vec2& b = points[hull[(i + 1) % h]];
    const Vec2 e = b - a;
    const double len = e.norm();
    // Left of a CCW edge is inside.
    const double d = (e.x() * (x.y() - a.y()) - e.y() * (x.x() - a.x())) / len;
    inside = std::min(inside, d);
  }
  if (inside >= 0.0) return inside;

  // Outside: the true distance is to the nearest edge segment.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h; ++i) {
    const Vec2& a = points[hull[i]];
    const Vec2& b = points[hull[(i + 1) % h]];
    const Vec2 e = b - a;
    const double t = std::clamp((x - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * e - x).norm());
  }
  return -best;
}

double diameter(std::span<const Vec2> points) {
  std::vector<int> candidates = convex_hull(points);
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      best = std::max(best, (points[candidates[i]] - points[candidates[j]]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace memlme
