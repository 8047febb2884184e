#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "memlme/error.hpp"
#include "memlme/generators.hpp"
#include "memlme/mesh.hpp"
#include "memlme/mesh_io.hpp"
#include "memlme/neighborhood.hpp"
#include "oracles.hpp"

using namespace memlme;
namespace fs = std::filesystem;

namespace {

TriMesh tetrahedron() {
  return TriMesh({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}});
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "memlme_mesh_tests";
  fs::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("tetrahedron census and outward orientation") {
  const TriMesh t = tetrahedron();
  CHECK(t.num_vertices() == 4);
  CHECK(t.num_edges() == 6);
  CHECK(t.num_faces() == 4);
  CHECK(t.euler_characteristic() == 2);
  CHECK(t.is_closed());
  CHECK(t.signed_volume() > 0);
}

TEST_CASE("inward-wound closed mesh is turned outward") {
  TriMesh t({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 2, 1}, {0, 3, 2}, {0, 1, 3}, {1, 2, 3}});
  CHECK(t.signed_volume() > 0);
  CHECK(t.flipped_faces() == 4);
}

TEST_CASE("inconsistent faces are repaired breadth-first") {
  TriMesh t({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2}, {0, 3, 2}, {0, 3, 1}, {1, 3, 2}});
  CHECK(t.flipped_faces() >= 1);
  CHECK(t.signed_volume() > 0);
  for (const Edge& e : t.edges()) {
    // each interior edge appears in opposite order in its two faces
    auto dir = [&](int f) {
      const Face& tri = t.faces()[static_cast<std::size_t>(f)];
      for (int k = 0; k < 3; ++k)
        if (tri[k] == e.v0 && tri[(k + 1) % 3] == e.v1) return 1;
      return -1;
    };
    CHECK(dir(e.f0) == -dir(e.f1));
  }
}

TEST_CASE("icosahedron: twelve fivefold vertices") {
  const TriMesh ico = generate_geodesic_sphere(1, 1.0);
  CHECK(ico.num_vertices() == 12);
  for (int v = 0; v < 12; ++v) CHECK(ico.valence(v) == 5);
}

TEST_CASE("mesh validation errors") {
  CHECK(code_of([] {
          TriMesh({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}},
                  {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}, {0, 1, 2}});
        }) == ErrorCode::kNonManifoldEdge);
  CHECK(code_of([] { TriMesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { TriMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}); }) == ErrorCode::kInvalidArgument);
  // Moebius strip: five quads, one half twist.
  std::vector<Vec3> v;
  const int n = 5;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * M_PI * i / n;
    for (double s : {-0.3, 0.3}) {
      const double c = std::cos(t / 2), sn = std::sin(t / 2);
      v.emplace_back((1 + s * c) * std::cos(t), (1 + s * c) * std::sin(t), s * sn);
    }
  }
  std::vector<Face> f;
  for (int i = 0; i < n; ++i) {
    const int a = 2 * i, b = 2 * i + 1;
    int c = 2 * ((i + 1) % n), d = c + 1;
    if (i == n - 1) std::swap(c, d);  // the twist
    f.push_back({a, c, b});
    f.push_back({b, c, d});
  }
  CHECK(code_of([&] { TriMesh(v, f); }) == ErrorCode::kOrientation);
}

TEST_CASE("OFF and OBJ round trips, parse errors") {
  const TriMesh t = tetrahedron();
  save_off(t, scratch("tet.off"));
  const TriMesh back = load_mesh(scratch("tet.off"));
  CHECK(back.num_faces() == 4);
  CHECK((back.vertex(2) - t.vertex(2)).norm() == 0.0);
  {
    std::ofstream out(scratch("tet.obj"));
    out << "# tetra\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nf 1/1 2/2 3/3\nf 1 3 4\nf -4 -1 -3\nf 2 4 3\n";
  }
  const TriMesh obj = load_mesh(scratch("tet.obj"));
  CHECK(obj.euler_characteristic() == 2);
  {
    std::ofstream out(scratch("bad.off"));
    out << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n";
  }
  CHECK(code_of([] { load_mesh(scratch("bad.off")); }) == ErrorCode::kParse);
  CHECK(code_of([] { load_mesh(scratch("missing.off")); }) == ErrorCode::kIo);
  {
    std::ofstream out(scratch("dup.off"));
    out << "OFF\n4 5 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n3 0 1 2\n";
  }
  CHECK(code_of([] { load_mesh(scratch("dup.off")); }) == ErrorCode::kNonManifoldEdge);
}

TEST_CASE("vertex normals") {
  SUBCASE("pyramid apex") {
    const TriMesh p({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}},
                    {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}});
    CHECK((vertex_normal(p, 0) - Vec3::UnitZ()).norm() < 1e-15);
  }
  SUBCASE("flat fan") {
    const TriMesh g = generate_planar_grid(4, 1.0);
    for (int v = 0; v < 16; ++v) CHECK(std::abs(std::abs(vertex_normal(g, v).z()) - 1) < 1e-15);
  }
  SUBCASE("geodesic sphere: within 2 degrees of radial") {
    const TriMesh s = generate_geodesic_sphere(8, 3.0);
    for (int v = 0; v < static_cast<int>(s.num_vertices()); ++v)
      CHECK(vertex_normal(s, v).dot(s.vertex(v).normalized()) > std::cos(2 * M_PI / 180));
  }
}

TEST_CASE("dual areas partition the surface") {
  const TriMesh tri({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}}, {{0, 1, 2}});
  for (double a : dual_areas(tri)) CHECK(a == doctest::Approx(tri.total_area() / 3));
  const TriMesh t = tetrahedron();
  for (double a : dual_areas(t)) CHECK(a == doctest::Approx(t.face_area(0)));
  for (int f : {1, 8, 24}) {
    const TriMesh s = generate_geodesic_sphere(f, 1992.0);
    double sum = 0;
    for (double a : dual_areas(s)) sum += a;
    CHECK(std::abs(sum - s.total_area()) <= 1e-10 * s.total_area());
  }
}

TEST_CASE("geodesic sphere census") {
  for (int f : {1, 2, 5, 24}) {
    const TriMesh s = generate_geodesic_sphere(f, 2.0);
    CHECK(s.num_vertices() == static_cast<std::size_t>(10 * f * f + 2));
    CHECK(s.euler_characteristic() == 2);
    CHECK(s.is_closed());
    int five = 0, six = 0;
    for (int v = 0; v < static_cast<int>(s.num_vertices()); ++v) {
      five += s.valence(v) == 5;
      six += s.valence(v) == 6;
      CHECK(s.vertex(v).norm() == doctest::Approx(2.0));
    }
    CHECK(five == 12);
    CHECK(six == static_cast<int>(s.num_vertices()) - 12);
  }
}

TEST_CASE("local frames") {
  const TriMesh s = generate_geodesic_sphere(8, 1.0);
  const Vec3 origin = Vec3::Zero();
  for (int v = 0; v < static_cast<int>(s.num_vertices()); ++v) {
    const LocalFrame f = local_frame(s, v, origin);
    CHECK(std::abs(f.e1.norm() - 1) < 1e-12);
    CHECK(std::abs(f.e2.norm() - 1) < 1e-12);
    CHECK(std::abs(f.n.norm() - 1) < 1e-12);
    CHECK(std::abs(f.e1.dot(f.e2)) < 1e-12);
    CHECK(std::abs(f.e1.dot(f.n)) < 1e-12);
    CHECK((f.e1.cross(f.e2) - f.n).norm() < 1e-12);
    CHECK(f.n.dot(vertex_normal(s, v)) < 0);  // inward z
    const Vec3 p = s.vertex(v);
    if (std::abs(p.z()) < 0.05) {
      // equator: e1 runs roughly east-west. Incident edges of a valence-6
      // vertex are ~60 degrees apart, so the best one can miss by a bit over 30.
      const Vec3 east = Vec3::UnitZ().cross(p).normalized();
      double best = 0;
      for (int w : s.vertex_neighbors(v)) {
        Vec3 t = s.vertex(w) - p;
        t -= t.dot(f.n) * f.n;
        best = std::max(best, std::abs(t.normalized().dot(east)));
      }
      CHECK(std::abs(f.e1.dot(east)) == doctest::Approx(best).epsilon(1e-12));
      CHECK(std::abs(f.e1.dot(east)) > std::cos(35 * M_PI / 180));
    }
  }
  SUBCASE("pole falls back to the x axis") {
    // Rotate so that a vertex sits exactly on the z axis.
    std::vector<Vec3> pts(s.vertices().begin(), s.vertices().end());
    const Vec3 top = pts[0].normalized();
    const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(top, Vec3::UnitZ());
    for (Vec3& p : pts) p = q * p;
    const TriMesh r = s.with_positions(pts);
    const LocalFrame f = local_frame(r, 0, origin);
    CHECK(std::abs(std::abs(f.e1.x()) - 1) < 0.2);  // an edge close to the x axis
    CHECK((f.e1.cross(f.e2) - f.n).norm() < 1e-12);
  }
  SUBCASE("planar patch with a far reference") {
    const TriMesh g = generate_planar_grid(5, 1.0);
    const LocalFrame f = local_frame(g, 12, Vec3(0.5, 0.5, -1e6));
    CHECK((f.e1.cross(f.e2) - f.n).norm() < 1e-12);
    CHECK(std::abs(f.n.z()) == doctest::Approx(1.0));
  }
}

TEST_CASE("knn neighbourhoods") {
  SUBCASE("grid interior, m = 4: the axis neighbours") {
    const PointCloud c = generate_sinusoid_grid(0, 3, 0.5);
    PointCloud flat = c;
    for (Vec3& p : flat.points) p.z() = 0;
    const SurfaceNodes nodes(flat);
    const int v = 3 * 7 + 3;
    const LocalNeighborhood nb = knn_neighborhood(nodes, v, 4);
    std::vector<int> got(nb.indices.begin() + 1, nb.indices.end());
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<int>{v - 7, v - 1, v + 1, v + 7});
    CHECK(nb.indices.front() == v);
    CHECK(nb.planar.front() == Vec2::Zero());
  }
  SUBCASE("hexagonal sphere vertex, m = 6: its mesh neighbours") {
    const TriMesh s = generate_geodesic_sphere(8, 1.0);
    const SurfaceNodes nodes(s);
    int checked = 0;
    for (int v = 0; v < static_cast<int>(s.num_vertices()) && checked < 50; ++v) {
      if (s.valence(v) != 6) continue;
      // skip vertices adjacent to a fivefold defect, where the metric ring is distorted
      bool near_defect = false;
      for (int w : s.vertex_neighbors(v)) near_defect |= s.valence(w) == 5;
      if (near_defect) continue;
      const LocalNeighborhood nb = knn_neighborhood(nodes, v, 6);
      std::vector<int> got(nb.indices.begin() + 1, nb.indices.end());
      std::sort(got.begin(), got.end());
      const auto adj = s.vertex_neighbors(v);
      CHECK(got == std::vector<int>(adj.begin(), adj.end()));
      ++checked;
    }
    CHECK(checked == 50);
  }
  SUBCASE("ties resolve by ascending index") {
    PointCloud c;
    c.points = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {2, 0, 0}};
    const LocalNeighborhood nb = knn_neighborhood(SurfaceNodes(c), 0, 2);
    CHECK(nb.indices == std::vector<int>{0, 1, 2});
  }
  SUBCASE("m = N") {
    const TriMesh t = tetrahedron();
    CHECK(code_of([&] { knn_neighborhood(SurfaceNodes(t), 0, 4); }) == ErrorCode::kInsufficientNodes);
  }
}

TEST_CASE("sinusoid generators") {
  CHECK(generate_sinusoid_grid(0, 3, 0.0303).points.size() == 100u * 100u);
  CHECK(generate_sinusoid_grid(0, 3, 0.0566).points.size() == 54u * 54u);
  const PointCloud g = generate_sinusoid_grid(0, 3, 0.0303);
  CHECK(g.points.front() == Vec3::Zero());
  const PointCloud a = generate_random_sinusoid(500, 7), b = generate_random_sinusoid(500, 7);
  CHECK(a.points == b.points);
  for (const Vec3& p : a.points) {
    CHECK(p.x() >= 0);
    CHECK(p.x() <= M_PI);
    CHECK(p.z() == std::sin(p.x() * p.x() + p.y()));
  }
}

TEST_CASE("rolling averages") {
  const TriMesh t = tetrahedron();
  Trajectory traj;
  traj.faces.assign(t.faces().begin(), t.faces().end());
  traj.times = {0.0};
  traj.frames = {std::vector<Vec3>(t.vertices().begin(), t.vertices().end())};
  CHECK(rolling_average(traj, 0.0).vertices()[1] == t.vertex(1));
  CHECK(code_of([&] { rolling_average(traj, -1.0); }) == ErrorCode::kEmptyWindow);

  SUBCASE("noisy sphere converges at the 1/sqrt(n) rate") {
    const double r = 10.0, sigma = 0.1;
    const int frames = 64;
    const Trajectory noisy = generate_noisy_sphere_trajectory(4, r, sigma, frames, 99);
    const TriMesh avg = rolling_average(noisy, frames);
    for (const Vec3& p : avg.vertices()) CHECK(std::abs(p.norm() - r) < 3 * sigma / std::sqrt(frames) + 1e-12);
  }
  SUBCASE("trajectory files round trip") {
    const Trajectory noisy = generate_noisy_sphere_trajectory(2, 1.0, 0.01, 3, 1);
    save_trajectory(noisy, scratch("traj.json"));
    const Trajectory back = load_trajectory(scratch("traj.json"));
    CHECK(back.times == noisy.times);
    CHECK(back.frames[2][5] == noisy.frames[2][5]);
  }
}

TEST_CASE("spatial index matches brute force") {
  memlme::testing::Rng rng(1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) pts.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
  pts.push_back(pts[10]);  // exact duplicate distance tie
  const PointIndex index(pts);
  for (int q = 0; q < 20; ++q) {
    const Vec3 x(rng.uniform(), rng.uniform(), rng.uniform());
    std::vector<int> brute(pts.size());
    std::iota(brute.begin(), brute.end(), 0);
    std::sort(brute.begin(), brute.end(), [&](int a, int b) {
      const double da = (pts[a] - x).squaredNorm(), db = (pts[b] - x).squaredNorm();
      return da != db ? da < db : a < b;
    });
    brute.resize(15);
    CHECK(index.nearest(x, 15) == brute);
    const double rad = 0.2;
    std::vector<int> in;
    for (int a : index.within(x, rad)) CHECK((pts[a] - x).norm() <= rad);
    int count = 0;
    for (const Vec3& p : pts) count += (p - x).norm() <= rad;
    CHECK(static_cast<int>(index.within(x, rad).size()) == count);
  }
}
