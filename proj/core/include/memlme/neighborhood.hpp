#pragma once

// Per-node stencils expressed in a local Monge frame.

#include <memory>
#include <optional>
#include <vector>

#include "memlme/generators.hpp"
#include "memlme/mesh.hpp"
#include "memlme/spatial_index.hpp"

namespace memlme {

// Nodes of a sampled surface with a frame at every node. Meshes use
// local_frame(); point clouds are treated as a single Monge chart over the
// global (x, y) plane with heights along +z.
class SurfaceNodes {
 public:
  explicit SurfaceNodes(const TriMesh& mesh, std::optional<Vec3> reference_center = std::nullopt);
  explicit SurfaceNodes(const PointCloud& cloud);

  std::size_t size() const noexcept { return points_.size(); }
  const Vec3& position(int v) const { return points_[static_cast<std::size_t>(v)]; }
  std::span<const Vec3> positions() const noexcept { return points_; }
  LocalFrame frame(int v) const;
  const PointIndex& index() const noexcept { return *index_; }
  const TriMesh* mesh() const noexcept { return mesh_; }

  // Typical node spacing: mean edge length on meshes, mean planar
  // nearest-neighbour distance on point clouds.
  double spacing() const noexcept { return spacing_; }

 private:
  const TriMesh* mesh_ = nullptr;
  Vec3 center_ = Vec3::Zero();
  std::vector<Vec3> points_;
  std::shared_ptr<const PointIndex> index_;
  double spacing_ = 0.0;
};

struct LocalNeighborhood {
  int center = -1;
  LocalFrame frame;
  std::vector<int> indices;   // center first
  std::vector<Vec2> planar;   // (x1, x2) in the frame; the center maps to (0, 0)
  std::vector<double> heights;
};

// Center plus its m nearest other nodes by 3D distance, ties broken by
// ascending index. Throws Error{kInsufficientNodes} if m + 1 > N.
LocalNeighborhood knn_neighborhood(const SurfaceNodes& nodes, int v, int m);

// Center plus every node within 3D distance `radius`.
LocalNeighborhood ball_neighborhood(const SurfaceNodes& nodes, int v, double radius);

}  // namespace memlme
