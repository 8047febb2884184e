#include <doctest.h>

#include <cmath>

#include "memlme/error.hpp"
#include "memlme/monge.hpp"
#include "oracles.hpp"

using namespace memlme;

namespace {

MongeJet2 jet(double gx, double gy, double hxx, double hxy, double hyy) {
  MongeJet2 j;
  j.grad = Vec2(gx, gy);
  j.hess << hxx, hxy, hxy, hyy;
  return j;
}

}  // namespace

TEST_CASE("fundamental forms") {
  const FundamentalForms f = fundamental_forms(jet(0.3, -0.4, 1, 2, 3));
  CHECK(f.a(0, 0) == doctest::Approx(1.09));
  CHECK(f.a(0, 1) == doctest::Approx(-0.12));
  CHECK(f.a(1, 1) == doctest::Approx(1.16));
  const double w = std::sqrt(1.25);
  CHECK(f.b(0, 1) == doctest::Approx(-2 / w));
  CHECK(f.b(1, 1) == doctest::Approx(-3 / w));
}

TEST_CASE("principal curvatures: analytic surfaces") {
  SUBCASE("sphere cap, heights towards the centre") {
    const double r = 2.5;
    const CurvatureEstimate c = curvature_of(jet(0, 0, 1 / r, 0, 1 / r));
    CHECK(c.H == doctest::Approx(-1 / r));
    CHECK(c.K == doctest::Approx(1 / (r * r)));
    CHECK(c.dir1 == Vec2::UnitX());  // umbilic tie-break
    CHECK(c.dir2 == Vec2::UnitY());
  }
  SUBCASE("cylinder") {
    const double rho = 0.8;
    const CurvatureEstimate c = curvature_of(jet(0, 0, 1 / rho, 0, 0));
    CHECK(c.H == doctest::Approx(-0.5 / rho));
    CHECK(std::abs(c.K) < 1e-15);
    CHECK(c.k1 == doctest::Approx(-1 / rho));
    CHECK((c.dir1 - Vec2::UnitX()).norm() < 1e-12);
  }
  SUBCASE("saddle") {
    const CurvatureEstimate c = curvature_of(jet(0, 0, 1, 0, -1));
    CHECK(std::abs(c.H) < 1e-15);
    CHECK(c.K == doctest::Approx(-1.0));
    CHECK(c.k1 == doctest::Approx(-1.0));
    CHECK(c.k2 == doctest::Approx(1.0));
  }
  SUBCASE("plane") {
    const CurvatureEstimate c = curvature_of(jet(0.7, -0.2, 0, 0, 0));
    CHECK(c.H == 0.0);
    CHECK(c.K == 0.0);
  }
}

TEST_CASE("K = det b / det a, H = tr(a^-1 b)/2, a-orthogonal directions") {
  memlme::testing::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const MongeJet2 j = jet(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-5, 5), rng.uniform(-5, 5),
                            rng.uniform(-5, 5));
    const FundamentalForms f = fundamental_forms(j);
    const CurvatureEstimate c = principal_curvatures(f.a, f.b);
    CHECK(c.K == doctest::Approx(f.b.determinant() / f.a.determinant()).epsilon(1e-10));
    CHECK(c.H == doctest::Approx(0.5 * (f.a.inverse() * f.b).trace()).epsilon(1e-10));
    CHECK(c.k1 <= c.k2);
    CHECK(((f.b - c.k1 * f.a) * c.dir1).norm() < 1e-8 * (1 + f.b.norm()));
    CHECK(((f.b - c.k2 * f.a) * c.dir2).norm() < 1e-8 * (1 + f.b.norm()));
    if (c.k2 - c.k1 > 1e-6) CHECK(std::abs(c.dir1.dot(f.a * c.dir2)) < 1e-8);
    CHECK(c.dir1.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("curvatures are invariant under rotation of the chart") {
  memlme::testing::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const MongeJet2 j = jet(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(-3, 3),
                            rng.uniform(-3, 3));
    const double t = rng.uniform(0, 2 * M_PI);
    Mat2 R;
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    MongeJet2 r;
    r.grad = R.transpose() * j.grad;
    r.hess = R.transpose() * j.hess * R;
    const CurvatureEstimate c0 = curvature_of(j), c1 = curvature_of(r);
    CHECK(c1.k1 == doctest::Approx(c0.k1).epsilon(1e-10));
    CHECK(c1.k2 == doctest::Approx(c0.k2).epsilon(1e-10));
  }
}

TEST_CASE("sinusoid jet matches finite differences") {
  auto z = [](double x, double y) { return std::sin(x * x + y); };
  const double h = 1e-4;
  for (const Vec2 p : {Vec2(0.5, 0.5), Vec2(1.3, 2.1), Vec2(2.5, 0.7)}) {
    const MongeJet2 j = sinusoid_jet(p);
    const double x = p.x(), y = p.y();
    CHECK(j.grad.x() == doctest::Approx((z(x + h, y) - z(x - h, y)) / (2 * h)).epsilon(1e-7));
    CHECK(j.grad.y() == doctest::Approx((z(x, y + h) - z(x, y - h)) / (2 * h)).epsilon(1e-7));
    CHECK(j.hess(0, 0) == doctest::Approx((z(x + h, y) - 2 * z(x, y) + z(x - h, y)) / (h * h)).epsilon(1e-5));
    CHECK(j.hess(1, 1) == doctest::Approx((z(x, y + h) - 2 * z(x, y) + z(x, y - h)) / (h * h)).epsilon(1e-5));
    const double hxy = (z(x + h, y + h) - z(x + h, y - h) - z(x - h, y + h) + z(x - h, y - h)) / (4 * h * h);
    CHECK(j.hess(0, 1) == doctest::Approx(hxy).epsilon(1e-5));
  }
  const MeanGauss origin = curvature_of_sinusoid(Vec2::Zero());
  // grad = (0, 1), hess = diag(2, 0): K = 0, H = -(2 * 2) / (2 * 2 * sqrt(2)).
  CHECK(std::abs(origin.K) < 1e-15);
  CHECK(origin.H == doctest::Approx(-1 / std::sqrt(2.0)));
}

TEST_CASE("degenerate metric") {
  Mat2 a;
  a << 1, 2, 2, 1;
  CHECK_THROWS_AS(principal_curvatures(a, Mat2::Zero()), Error);
  try {
    principal_curvatures(Mat2::Zero(), Mat2::Identity());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateMetric);
  }
}
