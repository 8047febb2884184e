#include "memlme/spatial_index.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace memlme {
namespace {

constexpr int kLeafSize = 12;

struct Candidate {
  double dist2;
  int index;
  bool operator<(const Candidate& o) const {
    return dist2 != o.dist2 ? dist2 < o.dist2 : index < o.index;
  }
};

}  // namespace

PointIndex::PointIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) build(0, static_cast<int>(points_.size()));
}

int PointIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a](axis) < points_[b](axis); });
  const double split = points_[order_[mid]](axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<int> PointIndex::nearest(const Vec3& q, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};
  std::priority_queue<Candidate> best;  // max-heap on (dist, index)
  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int p = order_[i];
        const Candidate c{(points_[p] - q).squaredNorm(), p};
        if (best.size() < k) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      return;
    }
    const double diff = q(node.axis) - node.split;
    const int first = diff < 0 ? node.left : node.right;
    const int second = diff < 0 ? node.right : node.left;
    self(self, first);
    if (best.size() < k || diff * diff <= best.top().dist2) self(self, second);
  };
  visit(visit, 0);
  std::vector<int> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top().index;
    best.pop();
  }
  return out;
}

std::vector<int> PointIndex::within(const Vec3& q, double radius) const {
  std::vector<Candidate> hits;
  if (points_.empty()) return {};
  const double r2 = radius * radius;
  auto visit = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int p = order_[i];
        const double d2 = (points_[p] - q).squaredNorm();
        if (d2 <= r2) hits.push_back({d2, p});
      }
      return;
    }
    const double diff = q(node.axis) - node.split;
    if (diff <= radius) self(self, node.left);
    if (diff >= -radius) self(self, node.right);
  };
  visit(visit, 0);
  std::sort(hits.begin(), hits.end());
  std::vector<int> out;
  out.reserve(hits.size());
  for (const Candidate& c : hits) out.push_back(c.index);
  return out;
}

double PointIndex::mean_spacing() const {
  if (points_.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const std::vector<int> nn = nearest(points_[i], 2);
    sum += (points_[nn[1]] - points_[i]).norm();
  }
  return sum / static_cast<double>(points_.size());
}

}  // namespace memlme
