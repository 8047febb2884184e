#include "memlme/neighborhood.hpp"

#include <cmath>

#include "memlme/error.hpp"

namespace memlme {
namespace {

LocalNeighborhood project(const SurfaceNodes& nodes, int v, std::vector<int> ids) {
  LocalNeighborhood nb;
  nb.center = v;
  nb.frame = nodes.frame(v);
  // The query node goes first; the rest keep their (distance, index) order.
  std::erase(ids, v);
  ids.insert(ids.begin(), v);
  nb.indices = std::move(ids);
  nb.planar.reserve(nb.indices.size());
  nb.heights.reserve(nb.indices.size());
  for (int a : nb.indices) {
    const Vec3 l = nb.frame.to_local(nodes.position(a));
    nb.planar.emplace_back(l.x(), l.y());
    nb.heights.push_back(l.z());
  }
  nb.planar.front().setZero();
  nb.heights.front() = 0.0;
  return nb;
}

}  // namespace

SurfaceNodes::SurfaceNodes(const TriMesh& mesh, std::optional<Vec3> reference_center)
    : mesh_(&mesh),
      center_(reference_center ? *reference_center : mesh.centroid()),
      points_(mesh.vertices().begin(), mesh.vertices().end()),
      index_(std::make_shared<PointIndex>(points_)) {
  double sum = 0.0;
  for (const Edge& e : mesh.edges()) sum += (mesh.vertex(e.v1) - mesh.vertex(e.v0)).norm();
  spacing_ = mesh.num_edges() ? sum / static_cast<double>(mesh.num_edges()) : 0.0;
}

SurfaceNodes::SurfaceNodes(const PointCloud& cloud)
    : points_(cloud.points), index_(std::make_shared<PointIndex>(points_)) {
  std::vector<Vec3> flat;
  flat.reserve(points_.size());
  for (const Vec3& p : points_) flat.emplace_back(p.x(), p.y(), 0.0);
  spacing_ = PointIndex(flat).mean_spacing();
}

LocalFrame SurfaceNodes::frame(int v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= points_.size())
    throw Error(ErrorCode::kInvalidArgument, "node index out of range");
  if (mesh_) return local_frame(*mesh_, v, center_);
  return LocalFrame::global(position(v));
}

LocalNeighborhood knn_neighborhood(const SurfaceNodes& nodes, int v, int m) {
  if (m < 0) throw Error(ErrorCode::kInvalidArgument, "m must be non-negative");
  if (static_cast<std::size_t>(m) + 1 > nodes.size())
    throw Error(ErrorCode::kInsufficientNodes,
                "m + 1 = " + std::to_string(m + 1) + " exceeds " + std::to_string(nodes.size()) + " nodes");
  // Ask for one extra so the center can be dropped even when a coincident
  // point sorts ahead of it.
  std::vector<int> ids = nodes.index().nearest(nodes.position(v), static_cast<std::size_t>(m) + 2);
  std::erase(ids, v);
  ids.resize(static_cast<std::size_t>(m));
  return project(nodes, v, std::move(ids));
}

LocalNeighborhood ball_neighborhood(const SurfaceNodes& nodes, int v, double radius) {
  if (!(radius >= 0)) throw Error(ErrorCode::kInvalidArgument, "radius must be non-negative");
  return project(nodes, v, nodes.index().within(nodes.position(v), radius * (1.0 + 1e-9)));
}

}  // namespace memlme
