#include "memlme/monge.hpp"

#include <cmath>

#include "memlme/error.hpp"

namespace memlme {
namespace {

constexpr double kUmbilicTolerance = 1e-9;

// Unit norm, first nonzero component positive.
Vec2 canonical(Vec2 v) {
  v.normalize();
  const double lead = std::abs(v.x()) > 1e-300 ? v.x() : v.y();
  return lead < 0.0 ? Vec2(-v) : v;
}

// Null vector of the 2x2 matrix m, which is singular up to roundoff. Uses the
// row with the larger norm.
Vec2 null_vector(const Mat2& m) {
  const Vec2 r0 = m.row(0).transpose();
  const Vec2 r1 = m.row(1).transpose();
  const Vec2 row = r0.squaredNorm() >= r1.squaredNorm() ? r0 : r1;
  return Vec2(-row.y(), row.x());
}

}  // namespace

FundamentalForms fundamental_forms(const MongeJet2& jet) {
  FundamentalForms f;
  f.a = Mat2::Identity() + jet.grad * jet.grad.transpose();
  const double w = std::sqrt(1.0 + jet.grad.squaredNorm());
  const Mat2 hess = 0.5 * (jet.hess + jet.hess.transpose());
  f.b = -hess / w;
  return f;
}

CurvatureEstimate principal_curvatures(const Mat2& a, const Mat2& b) {
  const double det_a = a.determinant();
  if (!(a(0, 0) > 0.0) || !(det_a > 1e-14 * a.squaredNorm()) || !a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::kDegenerateMetric, "first fundamental form is not positive definite");
  }
  // det(b - k a) = det(a) k^2 - (a00 b11 + a11 b00 - a01 b10 - a10 b01) k + det(b)
  const double tr = a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1);
  const double det_b = b.determinant();
  const double mean = 0.5 * tr / det_a;  // H
  const double gauss = det_b / det_a;    // K
  const double disc = std::max(mean * mean - gauss, 0.0);
  const double root = std::sqrt(disc);

  CurvatureEstimate c;
  // Avoid cancellation in the smaller-magnitude root.
  if (mean >= 0.0) {
    c.k2 = mean + root;
    c.k1 = c.k2 != 0.0 ? gauss / c.k2 : mean - root;
  } else {
    c.k1 = mean - root;
    c.k2 = c.k1 != 0.0 ? gauss / c.k1 : mean + root;
  }
  if (c.k1 > c.k2) std::swap(c.k1, c.k2);
  c.H = mean;
  c.K = gauss;

  if (std::abs(c.k1 - c.k2) <= kUmbilicTolerance * (std::abs(c.k1) + std::abs(c.k2) + 1e-30)) {
    c.dir1 = Vec2::UnitX();
    c.dir2 = Vec2::UnitY();
    return c;
  }
  c.dir1 = canonical(null_vector(b - c.k1 * a));
  c.dir2 = canonical(null_vector(b - c.k2 * a));
  return c;
}

MongeJet2 sinusoid_jet(const Vec2& x) {
  const double u = x.x() * x.x() + x.y();
  const double s = std::sin(u);
  const double c = std::cos(u);
  MongeJet2 jet;
  jet.z = s;
  jet.grad = Vec2(2.0 * x.x() * c, c);
  jet.hess << 2.0 * c - 4.0 * x.x() * x.x() * s, -2.0 * x.x() * s,
              -2.0 * x.x() * s, -s;
  return jet;
}

MeanGauss curvature_of_sinusoid(const Vec2& x) {
  const CurvatureEstimate c = curvature_of(sinusoid_jet(x));
  return {c.H, c.K};
}

}  // namespace memlme
