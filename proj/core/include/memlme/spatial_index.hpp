#pragma once

#include <span>
#include <vector>

#include "memlme/types.hpp"

namespace memlme {

// Static 3D k-d tree over a point array. Queries return indices ordered by
// (distance, index) so that ties resolve deterministically.
class PointIndex {
 public:
  explicit PointIndex(std::span<const Vec3> points);

  std::size_t size() const noexcept { return points_.size(); }

  // The k nearest points to q (q itself included if it is in the set).
  std::vector<int> nearest(const Vec3& q, std::size_t k) const;

  // All points with |p - q| <= radius.
  std::vector<int> within(const Vec3& q, double radius) const;

  // Mean distance from each point to its nearest other point.
  double mean_spacing() const;

 private:
  struct Node {
    int begin = 0, end = 0;  // range in order_
    int left = -1, right = -1;
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
  };

  int build(int begin, int end);

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace memlme
