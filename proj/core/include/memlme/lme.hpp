#pragma once

// Local maximum-entropy (LME) shape functions on a planar node set.
//
// For a query point x inside the convex hull of the nodes, the shape
// functions p_a(x) minimize  beta * sum p_a |x - x_a|^2 + sum p_a log p_a
// subject to p_a >= 0, sum p_a = 1 and sum p_a x_a = x. The minimizer is
// p_a = Z_a / Z with Z_a = exp(-beta |x - x_a|^2 + lambda . (x - x_a)) and
// lambda* the minimizer of the convex dual F(lambda) = log Z.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "memlme/types.hpp"

namespace memlme {

using MatX2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Immutable planar node set. Nodes must be finite and pairwise distinct.
// Collinear sets are accepted; their affine rank is recorded and the solver
// then works in the 1D affine hull.
class NodeSet2D {
 public:
  explicit NodeSet2D(std::vector<Vec2> nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Vec2& operator[](std::size_t a) const noexcept { return nodes_[a]; }
  std::span<const Vec2> nodes() const noexcept { return nodes_; }

  double diameter() const noexcept { return diameter_; }
  // 0 (single node), 1 (collinear) or 2.
  int affine_rank() const noexcept { return rank_; }
  // Counter-clockwise hull vertex indices (rank 2 only).
  std::span<const int> hull() const noexcept { return hull_; }

  // Signed distance of x to the hull boundary, positive inside. For rank < 2
  // this is minus the distance to the segment (or point) spanned by the nodes.
  double hull_distance(const Vec2& x) const;

 private:
  std::vector<Vec2> nodes_;
  std::vector<int> hull_;
  double diameter_ = 0.0;
  int rank_ = 0;
  Vec2 line_origin_ = Vec2::Zero();
  Vec2 line_dir_ = Vec2::UnitX();
};

struct LmeParams {
  double beta = 0.0;         // 1/length^2
  double tol_factor = 1e-6;  // |r| < tol_factor * diam terminates Newton
  int max_iter = 100;

  void validate() const;
};

// Exponentials are returned relative to the largest exponent:
// Z_a = scaled[a] * exp(log_shift).
struct PartitionTerms {
  Eigen::VectorXd scaled;
  double scaled_sum = 0.0;
  double log_shift = 0.0;

  double log_z() const;
};

PartitionTerms partition_terms(const NodeSet2D& nodes, const Vec2& x, const Vec2& lambda, double beta);

// Gradient r and Hessian J of F(lambda) = log Z together with the
// shape-function values p at the given multipliers.
struct DualState {
  Eigen::VectorXd p;
  Vec2 r = Vec2::Zero();
  Mat2 J = Mat2::Zero();
  double F = 0.0;
};

DualState dual_gradient_hessian(const NodeSet2D& nodes, const Vec2& x, const Vec2& lambda, double beta);

struct LmeSolution {
  Vec2 lambda = Vec2::Zero();
  Eigen::VectorXd p;
  MatX2 grad_p;                // row a = grad p_a
  std::vector<Mat2> hess_p;    // hess_p[a] = second derivatives of p_a
  Vec2 r = Vec2::Zero();
  Mat2 J = Mat2::Zero();
  double beta = 0.0;
  int iterations = 0;
  bool converged = false;
  int affine_rank = 2;
  // Dual objective after every accepted iterate, starting at lambda = 0.
  std::vector<double> objective_trace;
};

// Newton-Raphson on the dual from lambda = 0 with step-halving line search.
// Fills lambda, p, r, J and diagnostics; derivatives are left empty.
// Throws Error{kNotInHull, kSingularHessian, kMaxIterExceeded}.
LmeSolution solve_lme(const NodeSet2D& nodes, const Vec2& x, const LmeParams& params);

// grad p_a = -p_a J^{-1} (x - x_a).
MatX2 shape_gradients(const LmeSolution& sol, const NodeSet2D& nodes, const Vec2& x);

// Second derivatives of p_a by differentiating the gradient expression; needs
// the gradients from shape_gradients.
std::vector<Mat2> shape_hessians(const LmeSolution& sol, const MatX2& grad_p, const NodeSet2D& nodes,
                                 const Vec2& x);

// solve_lme followed by both derivative passes.
LmeSolution solve_lme_with_derivatives(const NodeSet2D& nodes, const Vec2& x, const LmeParams& params);

}  // namespace memlme
