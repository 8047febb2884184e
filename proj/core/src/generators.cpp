#include "memlme/generators.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "memlme/error.hpp"

namespace memlme {
namespace {

// splitmix64
std::uint64_t next_u64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void icosahedron(std::vector<Vec3>& v, std::vector<Face>& f) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
       {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  f = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
       {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
       {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
}

}  // namespace

double uniform01(std::uint64_t& state) { return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53; }

double normal01(std::uint64_t& state) {
  // Box-Muller; one deviate per call keeps the stream simple.
  double u1 = uniform01(state);
  while (u1 <= 0.0) u1 = uniform01(state);
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TriMesh generate_geodesic_sphere(int frequency, double radius) {
  if (frequency < 1) throw Error(ErrorCode::kInvalidArgument, "frequency must be >= 1");
  if (!(radius > 0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  std::vector<Vec3> ico;
  std::vector<Face> ico_faces;
  icosahedron(ico, ico_faces);
  const int f = frequency;

  // A lattice point is identified by its icosahedron support and weights,
  // sorted by vertex id, so shared edges and corners deduplicate exactly.
  using Key = std::array<int, 6>;
  std::map<Key, int> index;
  std::vector<Vec3> verts;
  auto vertex_id = [&](const Face& tri, int i, int j) {
    const int k = f - i - j;
    std::array<std::pair<int, int>, 3> w{{{tri[0], i}, {tri[1], j}, {tri[2], k}}};
    std::sort(w.begin(), w.end());
    Key key{};
    int n = 0;
    for (const auto& [v, wt] : w)
      if (wt > 0) {
        key[static_cast<std::size_t>(2 * n)] = v;
        key[static_cast<std::size_t>(2 * n + 1)] = wt;
        ++n;
      }
    for (; n < 3; ++n) key[static_cast<std::size_t>(2 * n)] = key[static_cast<std::size_t>(2 * n + 1)] = -1;
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(verts.size()));
    if (inserted) {
      const Vec3 p = (i * ico[static_cast<std::size_t>(tri[0])] + j * ico[static_cast<std::size_t>(tri[1])] +
                      k * ico[static_cast<std::size_t>(tri[2])]) /
                     static_cast<double>(f);
      verts.push_back(radius * p.normalized());
    }
    return it->second;
  };

  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(20 * f * f));
  for (const Face& tri : ico_faces) {
    // (i, j) are the weights of corners 0 and 1; moving j -> j+1 walks
    // towards corner 1, i -> i-1 away from corner 0.
    for (int i = f; i >= 1; --i) {
      for (int j = 0; j <= f - i; ++j) {
        const int a = vertex_id(tri, i, j);
        const int b = vertex_id(tri, i - 1, j + 1);
        const int c = vertex_id(tri, i - 1, j);
        faces.push_back({a, b, c});
        if (j < f - i) {
          const int d = vertex_id(tri, i, j + 1);
          faces.push_back({a, d, b});
        }
      }
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

TriMesh generate_cylinder(int columns, int rows, double radius) {
  if (columns < 4 || columns % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "columns must be even and >= 4");
  if (rows < 2) throw Error(ErrorCode::kInvalidArgument, "rows must be >= 2");
  if (!(radius > 0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  const double dphi = 2.0 * std::numbers::pi / columns;
  const double chord = 2.0 * radius * std::sin(dphi / 2.0);
  const double step = 2.0 * chord / std::sqrt(3.0);
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(columns * rows));
  for (int c = 0; c < columns; ++c)
    for (int r = 0; r < rows; ++r) {
      const double phi = c * dphi;
      verts.emplace_back(radius * std::cos(phi), radius * std::sin(phi), (r + 0.5 * (c % 2)) * step);
    }
  auto id = [&](int c, int r) { return (c % columns) * rows + r; };
  std::vector<Face> faces;
  for (int c = 0; c < columns; ++c) {
    const bool even = c % 2 == 0;
    for (int r = 0; r + 1 < rows; ++r) {
      if (even) {
        faces.push_back({id(c, r), id(c + 1, r), id(c, r + 1)});
        faces.push_back({id(c + 1, r), id(c + 1, r + 1), id(c, r + 1)});
      } else {
        faces.push_back({id(c, r), id(c + 1, r + 1), id(c, r + 1)});
        faces.push_back({id(c, r), id(c + 1, r), id(c + 1, r + 1)});
      }
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

TriMesh generate_planar_grid(int n, double size) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "n must be >= 2");
  const double h = size / (n - 1);
  std::vector<Vec3> verts;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) verts.emplace_back(i * h, j * h, 0.0);
  std::vector<Face> faces;
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int a = j * n + i;
      faces.push_back({a, a + 1, a + n + 1});
      faces.push_back({a, a + n + 1, a + n});
    }
  return TriMesh(std::move(verts), std::move(faces));
}

int sinusoid_grid_side(double lo, double hi, double h) {
  if (!(h > 0) || !(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "need h > 0 and hi > lo");
  return static_cast<int>(std::lround((hi - lo) / h)) + 1;
}

PointCloud generate_sinusoid_grid(double lo, double hi, double h) {
  const int n = sinusoid_grid_side(lo, hi, h);
  const double step = (hi - lo) / (n - 1);
  PointCloud pc;
  pc.points.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = lo + i * step, y = lo + j * step;
      pc.points.emplace_back(x, y, std::sin(x * x + y));
    }
  return pc;
}

PointCloud generate_random_sinusoid(int n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "need at least 3 nodes");
  std::uint64_t s = seed;
  PointCloud pc;
  for (int k = 0; k < n; ++k) {
    const double x = std::numbers::pi * uniform01(s);
    const double y = std::numbers::pi * uniform01(s);
    pc.points.emplace_back(x, y, std::sin(x * x + y));
  }
  return pc;
}

Trajectory generate_noisy_sphere_trajectory(int frequency, double radius, double sigma, int frames,
                                            std::uint64_t seed) {
  if (frames < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one frame");
  const TriMesh base = generate_geodesic_sphere(frequency, radius);
  Trajectory traj;
  traj.faces.assign(base.faces().begin(), base.faces().end());
  std::uint64_t s = seed;
  for (int k = 0; k < frames; ++k) {
    std::vector<Vec3> pos;
    pos.reserve(base.num_vertices());
    for (const Vec3& p : base.vertices()) pos.push_back(p * (1.0 + sigma * normal01(s) / radius));
    traj.times.push_back(k + 1.0);
    traj.frames.push_back(std::move(pos));
  }
  return traj;
}

}  // namespace memlme
