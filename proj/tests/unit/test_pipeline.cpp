#include <doctest.h>

#include <cmath>
#include <sstream>

#include "memlme/error.hpp"
#include "memlme/generators.hpp"
#include "memlme/pipeline.hpp"
#include "oracles.hpp"

using namespace memlme;

namespace {

LocalNeighborhood planar_stencil(std::vector<Vec2> pts, std::vector<double> z) {
  LocalNeighborhood nb;
  nb.center = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) nb.indices.push_back(static_cast<int>(i));
  nb.planar = std::move(pts);
  nb.heights = std::move(z);
  return nb;
}

// Hexagonal patch of radius `rings` around the origin, spacing h.
std::vector<Vec2> hex_patch(int rings, double h) {
  std::vector<Vec2> pts{Vec2::Zero()};
  const Vec2 a(h, 0), b(h / 2, h * std::sqrt(3.0) / 2);
  for (int i = -rings; i <= rings; ++i)
    for (int j = -rings; j <= rings; ++j) {
      if (i == 0 && j == 0) continue;
      if (std::abs(i + j) > rings) continue;
      pts.push_back(i * a + j * b);
    }
  return pts;
}

}  // namespace

TEST_CASE("effective beta") {
  CHECK(effective_beta(planar_stencil({{0, 0}, {2, 0}}, {0, 0}), 100) == doctest::Approx(25));
  CHECK(effective_beta(planar_stencil({{0, 0}, {2, 0}}, {0, 0}), 0) == 0);
  CHECK(effective_beta(planar_stencil({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 0, 0, 0}), 150) == doctest::Approx(75));
}

TEST_CASE("node curvature: analytic stencils") {
  PipelineConfig cfg;
  const std::vector<Vec2> pts = hex_patch(6, 0.1);
  SUBCASE("plane") {
    const NodeEstimate e = estimate_node_curvature(planar_stencil(pts, std::vector<double>(pts.size(), 0.0)), cfg);
    CHECK(e.curvature.H == 0.0);
    CHECK(e.curvature.K == 0.0);
  }
  SUBCASE("tilted plane") {
    std::vector<double> z;
    for (const Vec2& p : pts) z.push_back(0.3 * p.x() - 0.7 * p.y());
    const NodeEstimate e = estimate_node_curvature(planar_stencil(pts, z), cfg);
    CHECK(std::abs(e.curvature.H) < 1e-9);
    CHECK((e.jet.grad - Vec2(0.3, -0.7)).norm() < 1e-9);
  }
  SUBCASE("sphere seen from inside") {
    const double r = 5.0;
    std::vector<double> z;
    for (const Vec2& p : pts) z.push_back(r - std::sqrt(r * r - p.squaredNorm()));
    const NodeEstimate e = estimate_node_curvature(planar_stencil(pts, z), cfg);
    CHECK(e.curvature.H == doctest::Approx(-1 / r).epsilon(0.02));
    CHECK(e.curvature.K == doctest::Approx(1 / (r * r)).epsilon(0.04));
  }
  SUBCASE("sinusoid at an interior grid node") {
    // z = sin(x1^2 + x2) around (1.5, 1.5), h = 0.0303, shell of 12 spacings.
    const Vec2 c(1.5, 1.5);
    std::vector<Vec2> grid;
    std::vector<double> z;
    const double h = 3.0 / 99;
    grid.emplace_back(0, 0);
    z.push_back(0);
    const double z0 = std::sin(c.x() * c.x() + c.y());
    for (int i = -12; i <= 12; ++i)
      for (int j = -12; j <= 12; ++j) {
        if ((i == 0 && j == 0) || i * i + j * j > 144) continue;
        const Vec2 p(i * h, j * h);
        grid.push_back(p);
        const Vec2 q = c + p;
        z.push_back(std::sin(q.x() * q.x() + q.y()) - z0);
      }
    PipelineConfig s;
    s.beta_bar = 150;
    const NodeEstimate e = estimate_node_curvature(planar_stencil(grid, z), s);
    const MeanGauss exact = curvature_of_sinusoid(c);
    CHECK(e.curvature.H == doctest::Approx(exact.H).epsilon(0.05));
  }
}

TEST_CASE("run_field on a sphere: statistics and Gauss-Bonnet") {
  const TriMesh s = generate_geodesic_sphere(8, 2.0);
  PipelineConfig cfg;
  cfg.m = 6;
  cfg.threads = 2;
  const CurvatureField f = run_field(SurfaceNodes(s), cfg);
  CHECK(f.summary.failed.empty());
  CHECK(f.summary.mean_H == doctest::Approx(-0.5).epsilon(0.03));
  REQUIRE(f.summary.total_K);
  CHECK(*f.summary.total_K / (4 * M_PI) == doctest::Approx(1.0).epsilon(0.06));

  SUBCASE("statistics recompute bit-for-bit") {
    double sh = 0, sk = 0;
    int n = 0;
    for (const NodeRecord& r : f.nodes) {
      REQUIRE(r.ok);
      sh += r.curvature.H;
      sk += r.curvature.K;
      ++n;
    }
    const double mh = sh / n;
    double ss = 0;
    for (const NodeRecord& r : f.nodes) ss += (r.curvature.H - mh) * (r.curvature.H - mh);
    CHECK(f.summary.mean_H == mh);
    CHECK(f.summary.mean_K == sk / n);
    CHECK(f.summary.sd_H == std::sqrt(ss / (n - 1)));
  }
  SUBCASE("thread count does not change the result") {
    PipelineConfig one = cfg;
    one.threads = 1;
    const CurvatureField g = run_field(SurfaceNodes(s), one);
    std::ostringstream a, b;
    write_curvature_csv(f, a);
    write_curvature_csv(g, b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("run_field: evaluation window and failures") {
  const PointCloud c = generate_sinusoid_grid(0, 3, 0.1);
  PipelineConfig cfg;
  cfg.beta_bar = 150;
  cfg.m = 5;
  Window w;
  w.lo.head<2>().setConstant(0.5);
  w.hi.head<2>().setConstant(2.5);
  cfg.window = w;
  const CurvatureField f = run_field(SurfaceNodes(c), cfg);
  CHECK(f.summary.evaluated == 21 * 21);
  for (const NodeRecord& r : f.nodes) CHECK(w.contains(r.position));

  SUBCASE("more than half failing is a hard error") {
    PipelineConfig bad = cfg;
    bad.max_iter = 1;
    bad.tol_factor = 1e-15;
    try {
      run_field(SurfaceNodes(c), bad);
      FAIL("expected TooManyFailures");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTooManyFailures);
    }
  }
  SUBCASE("m + 1 > N") {
    PipelineConfig big = cfg;
    big.m = 2000;
    CHECK_THROWS_AS(run_field(SurfaceNodes(c), big), Error);
  }
}

TEST_CASE("rmsd") {
  CurvatureField f;
  for (int i = 0; i < 4; ++i) {
    NodeRecord r;
    r.index = i;
    r.ok = true;
    r.curvature.H = 0.1 * i;
    r.curvature.K = -0.2 * i;
    f.nodes.push_back(r);
  }
  std::vector<MeanGauss> same, offset;
  for (const NodeRecord& r : f.nodes) {
    same.push_back({r.curvature.H, r.curvature.K});
    offset.push_back({r.curvature.H - 0.25, r.curvature.K});
  }
  const Rmsd z = rmsd_vs_reference(f, same);
  CHECK(z.H == 0);
  CHECK(z.K == 0);
  CHECK(rmsd_vs_reference(f, offset).H == doctest::Approx(0.25));
  same.pop_back();
  try {
    rmsd_vs_reference(f, same);
    FAIL("expected MismatchedNodes");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMismatchedNodes);
  }
}

TEST_CASE("sample_surface") {
  SUBCASE("affine data is reproduced") {
    memlme::testing::Rng rng(4);
    std::vector<Vec3> pts;
    for (int i = 0; i < 60; ++i) {
      const double x = rng.uniform(0, 1), y = rng.uniform(0, 1);
      pts.emplace_back(x, y, 2 - x + 3 * y);
    }
    const auto g = sample_surface(pts, LmeParams{5.0, 1e-10}, GridSpec{0.1, 0.9, 0.1, 0.9, 6, 6});
    int ok = 0;
    for (const GridSample& s : g) {
      if (!s.ok) continue;
      ++ok;
      CHECK(std::abs(s.z - (2 - s.x + 3 * s.y)) < 1e-9);
    }
    CHECK(ok > 30);
  }
  SUBCASE("symmetric stencil gives the symmetric average") {
    const std::vector<Vec3> pts{{-1, 0, 1}, {1, 0, 1}, {0, -1, 3}, {0, 1, 3}};
    const auto g = sample_surface(pts, LmeParams{1.0, 1e-12}, GridSpec{0, 0, 0, 0, 1, 1});
    REQUIRE(g[0].ok);
    CHECK(g[0].z == doctest::Approx(2.0));
  }
  SUBCASE("variance grows with beta") {
    const PointCloud c = generate_random_sinusoid(500, 7);
    auto variance = [&](double beta) {
      const auto g = sample_surface(c.points, LmeParams{beta}, GridSpec{0, M_PI, 0, M_PI, 12, 12});
      double s = 0, s2 = 0;
      int n = 0;
      for (const GridSample& p : g)
        if (p.ok) {
          s += p.z;
          s2 += p.z * p.z;
          ++n;
        }
      return s2 / n - (s / n) * (s / n);
    };
    CHECK(variance(10.0) > variance(0.001));
  }
}
