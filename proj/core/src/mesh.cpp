#include "memlme/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <utility>

#include "memlme/error.hpp"

namespace memlme {
namespace {

// True if the directed edge (a -> b) occurs in face f.
bool has_directed(const Face& f, int a, int b) {
  for (int k = 0; k < 3; ++k)
    if (f[k] == a && f[(k + 1) % 3] == b) return true;
  return false;
}

// Builds a CSR adjacency from (key, value) pairs.
void to_csr(std::size_t n, std::vector<std::pair<int, int>>& pairs, std::vector<int>& offsets,
            std::vector<int>& values) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  offsets.assign(n + 1, 0);
  for (const auto& [k, _] : pairs) ++offsets[static_cast<std::size_t>(k) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  values.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = pairs[i].second;
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = static_cast<int>(vertices_.size());
  for (const Vec3& p : vertices_)
    if (!p.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite vertex");
  double scale2 = 0.0;
  if (!vertices_.empty()) {
    Vec3 lo = vertices_.front(), hi = lo;
    for (const Vec3& p : vertices_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    scale2 = (hi - lo).squaredNorm();
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= nv)
        throw Error(ErrorCode::kInvalidArgument, "face " + std::to_string(f) + " has an invalid index");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(ErrorCode::kInvalidArgument, "face " + std::to_string(f) + " repeats a vertex");
    if (face_area(static_cast<int>(f)) <= 1e-14 * scale2)
      throw Error(ErrorCode::kInvalidArgument, "face " + std::to_string(f) + " is degenerate");
  }
  build_topology();
  orient();
}

TriMesh TriMesh::with_positions(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size())
    throw Error(ErrorCode::kInvalidArgument, "vertex count does not match topology");
  TriMesh out = *this;
  out.vertices_ = std::move(vertices);
  return out;
}

void TriMesh::build_topology() {
  const std::size_t nv = vertices_.size();
  std::map<std::pair<int, int>, Edge> edge_map;
  std::vector<std::pair<int, int>> vf, vv;
  vf.reserve(faces_.size() * 3);
  vv.reserve(faces_.size() * 6);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      vf.emplace_back(a, static_cast<int>(f));
      vv.emplace_back(a, b);
      vv.emplace_back(b, a);
      const auto key = std::minmax(a, b);
      Edge& e = edge_map[{key.first, key.second}];
      e.v0 = key.first;
      e.v1 = key.second;
      if (e.f0 < 0) {
        e.f0 = static_cast<int>(f);
      } else if (e.f1 < 0) {
        e.f1 = static_cast<int>(f);
      } else {
        throw Error(ErrorCode::kNonManifoldEdge, "edge (" + std::to_string(key.first) + ", " +
                                                     std::to_string(key.second) +
                                                     ") is shared by more than two faces");
      }
    }
  }
  edges_.clear();
  edges_.reserve(edge_map.size());
  closed_ = !faces_.empty();
  boundary_.assign(nv, 0);
  for (const auto& [_, e] : edge_map) {
    edges_.push_back(e);
    if (!e.interior()) {
      closed_ = false;
      boundary_[static_cast<std::size_t>(e.v0)] = 1;
      boundary_[static_cast<std::size_t>(e.v1)] = 1;
    }
  }
  to_csr(nv, vf, vf_offsets_, vf_);
  to_csr(nv, vv, vv_offsets_, vv_);
}

void TriMesh::orient() {
  const std::size_t nf = faces_.size();
  // Face adjacency through interior edges.
  std::vector<std::vector<std::pair<int, std::pair<int, int>>>> nbr(nf);
  for (const Edge& e : edges_) {
    if (!e.interior()) continue;
    nbr[static_cast<std::size_t>(e.f0)].push_back({e.f1, {e.v0, e.v1}});
    nbr[static_cast<std::size_t>(e.f1)].push_back({e.f0, {e.v0, e.v1}});
  }
  std::vector<int> component(nf, -1);
  int ncomp = 0;
  for (std::size_t seed = 0; seed < nf; ++seed) {
    if (component[seed] >= 0) continue;
    std::queue<int> queue;
    queue.push(static_cast<int>(seed));
    component[seed] = ncomp;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop();
      for (const auto& [g, edge] : nbr[static_cast<std::size_t>(f)]) {
        const auto [a, b] = edge;
        const Face& tf = faces_[static_cast<std::size_t>(f)];
        const bool fwd = has_directed(tf, a, b);
        Face& tg = faces_[static_cast<std::size_t>(g)];
        const bool consistent = has_directed(tg, a, b) != fwd;
        if (component[static_cast<std::size_t>(g)] < 0) {
          if (!consistent) {
            std::swap(tg[1], tg[2]);
            ++flipped_;
          }
          component[static_cast<std::size_t>(g)] = ncomp;
          queue.push(g);
        } else if (!consistent) {
          throw Error(ErrorCode::kOrientation, "surface is not orientable");
        }
      }
    }
    ++ncomp;
  }
  // Turn closed components outward.
  std::vector<double> volume(static_cast<std::size_t>(ncomp), 0.0);
  std::vector<char> open(static_cast<std::size_t>(ncomp), 0);
  for (const Edge& e : edges_)
    if (!e.interior()) open[static_cast<std::size_t>(component[static_cast<std::size_t>(e.f0)])] = 1;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    volume[static_cast<std::size_t>(component[f])] += vertex(t[0]).dot(vertex(t[1]).cross(vertex(t[2])));
  }
  for (std::size_t f = 0; f < nf; ++f) {
    const auto c = static_cast<std::size_t>(component[f]);
    if (!open[c] && volume[c] < 0) {
      std::swap(faces_[f][1], faces_[f][2]);
      ++flipped_;
    }
  }
}

std::span<const int> TriMesh::vertex_faces(int v) const {
  const auto i = static_cast<std::size_t>(v);
  return {vf_.data() + vf_offsets_[i], static_cast<std::size_t>(vf_offsets_[i + 1] - vf_offsets_[i])};
}

std::span<const int> TriMesh::vertex_neighbors(int v) const {
  const auto i = static_cast<std::size_t>(v);
  return {vv_.data() + vv_offsets_[i], static_cast<std::size_t>(vv_offsets_[i + 1] - vv_offsets_[i])};
}

Vec3 TriMesh::face_normal(int f) const {
  const Face& t = faces_[static_cast<std::size_t>(f)];
  return (vertex(t[1]) - vertex(t[0])).cross(vertex(t[2]) - vertex(t[0])).normalized();
}

double TriMesh::face_area(int f) const {
  const Face& t = faces_[static_cast<std::size_t>(f)];
  return 0.5 * (vertex(t[1]) - vertex(t[0])).cross(vertex(t[2]) - vertex(t[0])).norm();
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) a += face_area(static_cast<int>(f));
  return a;
}

Vec3 TriMesh::centroid() const {
  Vec3 c = Vec3::Zero();
  double area = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    const double w = face_area(static_cast<int>(f));
    c += w * (vertex(t[0]) + vertex(t[1]) + vertex(t[2])) / 3.0;
    area += w;
  }
  if (area > 0) return c / area;
  for (const Vec3& p : vertices_) c += p;
  return vertices_.empty() ? c : Vec3(c / static_cast<double>(vertices_.size()));
}

double TriMesh::signed_volume() const {
  double v = 0.0;
  for (const Face& t : faces_) v += vertex(t[0]).dot(vertex(t[1]).cross(vertex(t[2])));
  return v / 6.0;
}

Vec3 vertex_normal(const TriMesh& mesh, int v) {
  Vec3 sum = Vec3::Zero();
  double scale = 0.0;
  for (int f : mesh.vertex_faces(v)) {
    const Face& t = mesh.faces()[static_cast<std::size_t>(f)];
    const Vec3 c = (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0]));
    sum += c;  // |c| = 2 * area
    scale += c.norm();
  }
  if (scale == 0.0 || sum.norm() <= 1e-12 * scale)
    throw Error(ErrorCode::kZeroNormal, "vertex " + std::to_string(v));
  return sum.normalized();
}

std::vector<double> dual_areas(const TriMesh& mesh) {
  std::vector<double> a(mesh.num_vertices(), 0.0);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const double third = mesh.face_area(static_cast<int>(f)) / 3.0;
    for (int v : mesh.faces()[f]) a[static_cast<std::size_t>(v)] += third;
  }
  return a;
}

LocalFrame local_frame(const TriMesh& mesh, int v, const std::optional<Vec3>& reference_center) {
  LocalFrame fr;
  fr.origin = mesh.vertex(v);
  fr.n = -vertex_normal(mesh, v);
  const Vec3 n = fr.n;
  auto tangent = [&](const Vec3& d) { return Vec3(d - d.dot(n) * n); };

  const Vec3 c = reference_center ? *reference_center : mesh.centroid();
  const Vec3 radial = fr.origin - c;
  // Parallel of the reference sphere through the vertex: the east direction.
  Vec3 parallel = Vec3::UnitZ().cross(radial);
  const double rn = radial.norm();
  if (rn == 0.0 || parallel.norm() <= 1e-6 * rn) {
    parallel = tangent(Vec3::UnitX());
    if (parallel.norm() < 1e-6) parallel = tangent(Vec3::UnitY());
  }
  parallel = tangent(parallel);
  const double pn = parallel.norm();

  Vec3 best = Vec3::Zero();
  double best_cos = -1.0;
  for (int w : mesh.vertex_neighbors(v)) {
    const Vec3 t = tangent(mesh.vertex(w) - fr.origin);
    const double tn = t.norm();
    if (tn <= 1e-12 * (mesh.vertex(w) - fr.origin).norm()) continue;
    const double cosang = pn > 0 ? std::abs(t.dot(parallel)) / (tn * pn) : 0.0;
    if (cosang > best_cos + 1e-12) {
      best_cos = cosang;
      best = t / tn;
      if (pn > 0 && best.dot(parallel) < 0) best = -best;
    }
  }
  if (best_cos < 0) throw Error(ErrorCode::kDegenerateFrame, "vertex " + std::to_string(v));
  fr.e1 = best;
  fr.e2 = n.cross(fr.e1).normalized();
  fr.e1 = fr.e2.cross(n).normalized();
  return fr;
}

void Trajectory::validate() const {
  if (frames.size() != times.size())
    throw Error(ErrorCode::kInvalidArgument, "frame and timestamp counts differ");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw Error(ErrorCode::kInvalidArgument, "timestamps must be strictly increasing");
  for (std::size_t k = 1; k < frames.size(); ++k)
    if (frames[k].size() != frames[0].size())
      throw Error(ErrorCode::kInvalidArgument, "frame " + std::to_string(k) + " has a different vertex count");
}

TriMesh rolling_average(const Trajectory& traj, double t) {
  traj.validate();
  if (traj.frames.empty() || t < traj.times.front())
    throw Error(ErrorCode::kEmptyWindow, "no frame at or before t = " + std::to_string(t));
  std::vector<Vec3> mean(traj.frames.front().size(), Vec3::Zero());
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.frames.size() && traj.times[k] <= t; ++k, ++count)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += traj.frames[k][i];
  for (Vec3& p : mean) p /= static_cast<double>(count);
  return TriMesh(std::move(mean), traj.faces);
}

}  // namespace memlme
