#pragma once

// Differential geometry of a Monge chart z = z(x1, x2).

#include "memlme/types.hpp"

namespace memlme {

// Value, slope and Hessian of a height function at one point.
struct MongeJet2 {
  double z = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

struct FundamentalForms {
  Mat2 a = Mat2::Identity();  // first form
  Mat2 b = Mat2::Zero();      // second form
};

// Principal curvatures k1 <= k2 with unit coefficient-space directions.
struct CurvatureEstimate {
  double k1 = 0.0;
  double k2 = 0.0;
  Vec2 dir1 = Vec2::UnitX();
  Vec2 dir2 = Vec2::UnitY();
  double H = 0.0;  // (k1 + k2) / 2
  double K = 0.0;  // k1 * k2
};

// a = I + grad z grad z^T,  b = -hess z / sqrt(1 + |grad z|^2).
// The sign of b makes convex caps seen from the inside (height measured
// towards the centre of curvature) report negative curvature.
FundamentalForms fundamental_forms(const MongeJet2& jet);

// Solves (b - k a) nu = 0. Throws Error{kDegenerateMetric} when `a` is not
// positive definite.
CurvatureEstimate principal_curvatures(const Mat2& a, const Mat2& b);

inline CurvatureEstimate curvature_of(const MongeJet2& jet) {
  const FundamentalForms f = fundamental_forms(jet);
  return principal_curvatures(f.a, f.b);
}

// Analytic jet and (H, K) of the benchmark surface z = sin(x1^2 + x2).
MongeJet2 sinusoid_jet(const Vec2& x);

struct MeanGauss {
  double H = 0.0;
  double K = 0.0;
};

MeanGauss curvature_of_sinusoid(const Vec2& x);

}  // namespace memlme
