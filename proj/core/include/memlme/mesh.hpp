#pragma once

// Indexed triangle meshes for membrane networks.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "memlme/types.hpp"

namespace memlme {

using Face = std::array<int, 3>;

struct Edge {
  int v0 = 0, v1 = 0;        // v0 < v1
  int f0 = -1, f1 = -1;      // f1 == -1 on boundary edges
  bool interior() const noexcept { return f1 >= 0; }
};

// Immutable triangle mesh. Construction validates indices, rejects
// degenerate faces and edges shared by more than two faces, and makes the
// orientation consistent by flipping faces breadth-first. Closed components
// are turned outward (positive signed volume); open components keep the
// orientation of their lowest-numbered face.
class TriMesh {
 public:
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  // Same topology, new vertex positions (trajectory frames).
  TriMesh with_positions(std::vector<Vec3> vertices) const;

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  int euler_characteristic() const noexcept {
    return static_cast<int>(vertices_.size()) - static_cast<int>(edges_.size()) +
           static_cast<int>(faces_.size());
  }
  bool is_closed() const noexcept { return closed_; }
  // Number of faces flipped while making the orientation consistent.
  int flipped_faces() const noexcept { return flipped_; }

  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  const Vec3& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  std::span<const Face> faces() const noexcept { return faces_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const int> vertex_faces(int v) const;
  // Adjacent vertices in ascending order.
  std::span<const int> vertex_neighbors(int v) const;
  int valence(int v) const { return static_cast<int>(vertex_neighbors(v).size()); }
  bool on_boundary(int v) const { return boundary_[static_cast<std::size_t>(v)] != 0; }

  Vec3 face_normal(int f) const;  // unit
  double face_area(int f) const;
  double total_area() const;
  // Area-weighted centroid of the surface.
  Vec3 centroid() const;
  double signed_volume() const;

 private:
  TriMesh() = default;
  void build_topology();
  void orient();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<int> vf_offsets_, vf_;
  std::vector<int> vv_offsets_, vv_;
  std::vector<char> boundary_;
  bool closed_ = false;
  int flipped_ = 0;
};

// Area-weighted unit normal. Throws Error{kZeroNormal}.
Vec3 vertex_normal(const TriMesh& mesh, int v);

// Barycentric dual areas: one third of every incident face.
std::vector<double> dual_areas(const TriMesh& mesh);

struct LocalFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 n = Vec3::UnitZ();

  static LocalFrame global(const Vec3& origin) { return LocalFrame{origin}; }
  // Frame coordinates (x1, x2, z) of a point.
  Vec3 to_local(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(e1), d.dot(e2), d.dot(n)};
  }
};

// Tangent frame at a vertex. n is the inward normal (the negated
// area-weighted vertex normal), so heights grow towards the centre of a
// convex, outward-oriented surface. e1 is the projected incident edge closest
// to the local parallel of a sphere centred at reference_center (default:
// mesh centroid); near the poles of that sphere the global x axis (then y)
// is projected instead. e2 = n x e1. Throws Error{kDegenerateFrame}.
LocalFrame local_frame(const TriMesh& mesh, int v,
                       const std::optional<Vec3>& reference_center = std::nullopt);

// Cumulative mean of the vertex positions of all frames up to a time.
struct Trajectory {
  std::vector<Face> faces;
  std::vector<double> times;
  std::vector<std::vector<Vec3>> frames;

  void validate() const;
  std::size_t size() const noexcept { return frames.size(); }
};

// Throws Error{kEmptyWindow} if t precedes the first frame.
TriMesh rolling_average(const Trajectory& traj, double t);

}  // namespace memlme
