#include "memlme/lme.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "memlme/error.hpp"
#include "memlme/hull.hpp"

namespace memlme {
namespace {

constexpr double kHullTolerance = 1e-9;     // relative to diam
constexpr double kCollinearTolerance = 1e-12;
constexpr double kMaxCondition = 1e12;
constexpr double kTikhonov = 1e-12;
constexpr int kMaxHalvings = 40;
constexpr double kMaxExponentStep = 30.0;

// Dual state in D projected coordinates. deltas.row(a) = x - x_a.
template <int D>
struct ProjectedState {
  using VecD = Eigen::Matrix<double, D, 1>;
  using MatD = Eigen::Matrix<double, D, D>;
  Eigen::VectorXd p;
  VecD r;
  MatD J;
  double F = 0.0;
};

template <int D>
ProjectedState<D> evaluate_dual(const Eigen::Matrix<double, Eigen::Dynamic, D>& deltas,
                                const Eigen::VectorXd& sq_dist, const Eigen::Matrix<double, D, 1>& lambda,
                                double beta) {
  ProjectedState<D> s;
  Eigen::VectorXd expo = -beta * sq_dist + deltas * lambda;
  const double shift = expo.maxCoeff();
  s.p = (expo.array() - shift).exp().matrix();
  const double z = s.p.sum();
  s.p /= z;
  s.F = std::log(z) + shift;
  s.r = deltas.transpose() * s.p;
  s.J = deltas.transpose() * s.p.asDiagonal() * deltas - s.r * s.r.transpose();
  return s;
}

Mat2 checked_inverse(const Mat2& J) {
  auto condition = [](const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(1);
    if (!(lo > 0.0) || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    return hi / lo;
  };
  if (condition(J) <= kMaxCondition) return J.inverse();
  const Mat2 shifted = J + kTikhonov * J.trace() / 2.0 * Mat2::Identity();
  if (condition(shifted) <= kMaxCondition) return shifted.inverse();
  std::ostringstream msg;
  msg << "dual Hessian is singular (cond > " << kMaxCondition << ")";
  throw Error(ErrorCode::kSingularHessian, msg.str());
}

Eigen::Matrix<double, 1, 1> checked_inverse(const Eigen::Matrix<double, 1, 1>& J) {
  if (!(J(0, 0) > 0.0)) throw Error(ErrorCode::kSingularHessian, "dual Hessian vanishes on the affine hull");
  return Eigen::Matrix<double, 1, 1>(1.0 / J(0, 0));
}

// Intermediate iterates may sit where p is nearly a Kronecker delta and J is
// numerically singular; a Levenberg shift still gives a descent direction.
template <int D>
Eigen::Matrix<double, D, D> iteration_inverse(const Eigen::Matrix<double, D, D>& J, double scale_sq) {
  try {
    return checked_inverse(J);
  } catch (const Error&) {
    using MatD = Eigen::Matrix<double, D, D>;
    const double mu = std::max(1e-6 * J.trace(), 1e-10 * scale_sq);
    const MatD shifted = J + mu * MatD::Identity();
    if (!shifted.allFinite()) throw;
    return shifted.inverse();
  }
}

template <int D>
struct NewtonResult {
  Eigen::Matrix<double, D, 1> lambda;
  ProjectedState<D> state;
  int iterations = 0;
  std::vector<double> trace;
};

template <int D>
NewtonResult<D> newton_dual(const Eigen::Matrix<double, Eigen::Dynamic, D>& deltas, double beta, double tolerance,
                            int max_iter) {
  const Eigen::VectorXd sq_dist = deltas.rowwise().squaredNorm();
  const double max_delta = std::sqrt(sq_dist.maxCoeff());
  NewtonResult<D> out;
  out.lambda.setZero();
  out.state = evaluate_dual<D>(deltas, sq_dist, out.lambda, beta);
  out.trace.push_back(out.state.F);

  while (out.state.r.norm() >= tolerance) {
    if (out.iterations >= max_iter) {
      std::ostringstream msg;
      msg << "no convergence after " << max_iter << " iterations, |r| = " << out.state.r.norm();
      throw Error(ErrorCode::kMaxIterExceeded, msg.str());
    }
    const Eigen::Matrix<double, D, 1> step = -(iteration_inverse<D>(out.state.J, max_delta * max_delta) * out.state.r);
    // From a near-Kronecker start J is tiny and the raw step absurd; cap the
    // change of any exponent lambda.d_a before halving.
    double t = std::min(1.0, kMaxExponentStep / std::max(step.norm() * max_delta, 1e-300));
    bool accepted = false;
    ProjectedState<D> trial;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      trial = evaluate_dual<D>(deltas, sq_dist, out.lambda + t * step, beta);
      // Near the optimum F is flat to roundoff; then a falling residual decides.
      const double slack = 64 * std::numeric_limits<double>::epsilon() * (std::abs(out.state.F) + 1.0);
      if (std::isfinite(trial.F) &&
          (trial.F < out.state.F - slack || (trial.F <= out.state.F + slack && trial.r.norm() < out.state.r.norm()))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::kMaxIterExceeded, "line search could not decrease the dual objective");
    }
    out.lambda += t * step;
    out.state = std::move(trial);
    out.trace.push_back(out.state.F);
    ++out.iterations;
  }
  return out;
}

}  // namespace

NodeSet2D::NodeSet2D(std::vector<Vec2> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "node set is empty");
  for (const Vec2& v : nodes_) {
    if (!v.allFinite()) throw Error(ErrorCode::kInvalidArgument, "node set contains a non-finite node");
  }
  hull_ = convex_hull(nodes_);
  for (std::size_t i = 0; i < hull_.size(); ++i) {
    for (std::size_t j = i + 1; j < hull_.size(); ++j) {
      diameter_ = std::max(diameter_, (nodes_[hull_[i]] - nodes_[hull_[j]]).norm());
    }
  }
  {
    // Coincident nodes are adjacent after a lexicographic sort.
    std::vector<Vec2> sorted = nodes_;
    std::sort(sorted.begin(), sorted.end(), [](const Vec2& a, const Vec2& b) {
      return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] == sorted[i - 1]) throw Error(ErrorCode::kInvalidArgument, "node set contains coincident nodes");
    }
  }

  if (nodes_.size() == 1) {
    rank_ = 0;
    line_origin_ = nodes_[0];
    return;
  }
  // Line through the farthest pair; everything within tolerance of it means rank 1.
  int ia = hull_[0], ib = hull_.size() > 1 ? hull_[1] : hull_[0];
  double best = -1.0;
  for (int i : hull_) {
    for (int j : hull_) {
      const double d = (nodes_[i] - nodes_[j]).squaredNorm();
      if (d > best) best = d, ia = i, ib = j;
    }
  }
  line_origin_ = nodes_[ia];
  line_dir_ = (nodes_[ib] - nodes_[ia]).normalized();
  double off_line = 0.0;
  for (const Vec2& v : nodes_) {
    const Vec2 d = v - line_origin_;
    off_line = std::max(off_line, std::abs(d.x() * line_dir_.y() - d.y() * line_dir_.x()));
  }
  rank_ = (off_line <= kCollinearTolerance * diameter_ || hull_.size() < 3) ? 1 : 2;
}

double NodeSet2D::hull_distance(const Vec2& x) const {
  if (rank_ == 2) return hull_signed_distance(nodes_, hull_, x);
  if (rank_ == 0) return -(x - line_origin_).norm();
  double lo = 0.0, hi = 0.0;
  for (const Vec2& v : nodes_) {
    const double s = line_dir_.dot(v - line_origin_);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double s = std::clamp(line_dir_.dot(x - line_origin_), lo, hi);
  return -(line_origin_ + s * line_dir_ - x).norm();
}

void LmeParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (!(tol_factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol_factor must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
}

double PartitionTerms::log_z() const { return std::log(scaled_sum) + log_shift; }

PartitionTerms partition_terms(const NodeSet2D& nodes, const Vec2& x, const Vec2& lambda, double beta) {
  const std::size_t n = nodes.size();
  PartitionTerms out;
  Eigen::VectorXd expo(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Vec2 d = x - nodes[a];
    expo(a) = -beta * d.squaredNorm() + lambda.dot(d);
  }
  out.log_shift = expo.maxCoeff();
  out.scaled = (expo.array() - out.log_shift).exp().matrix();
  out.scaled_sum = out.scaled.sum();
  return out;
}

DualState dual_gradient_hessian(const NodeSet2D& nodes, const Vec2& x, const Vec2& lambda, double beta) {
  const std::size_t n = nodes.size();
  MatX2 deltas(n, 2);
  for (std::size_t a = 0; a < n; ++a) deltas.row(a) = (x - nodes[a]).transpose();
  const ProjectedState<2> s = evaluate_dual<2>(deltas, deltas.rowwise().squaredNorm(), lambda, beta);
  return DualState{s.p, s.r, s.J, s.F};
}

LmeSolution solve_lme(const NodeSet2D& nodes, const Vec2& x, const LmeParams& params) {
  params.validate();
  const std::size_t n = nodes.size();
  const double diam = nodes.diameter();
  if (nodes.hull_distance(x) < -kHullTolerance * std::max(diam, 1e-300)) {
    std::ostringstream msg;
    msg << "query point (" << x.x() << ", " << x.y() << ") lies outside the convex hull of " << n << " nodes";
    throw Error(ErrorCode::kNotInHull, msg.str());
  }

  LmeSolution sol;
  sol.beta = params.beta;
  sol.affine_rank = nodes.affine_rank();

  if (nodes.affine_rank() == 0) {
    sol.p = Eigen::VectorXd::Ones(1);
    sol.converged = true;
    sol.objective_trace.push_back(0.0);
    return sol;
  }

  const double tolerance = params.tol_factor * diam;
  if (nodes.affine_rank() == 1) {
    // Solve in the affine hull: a 1D problem along the node line.
    const Vec2 dir = (nodes[nodes.hull()[1]] - nodes[nodes.hull()[0]]).normalized();
    Eigen::Matrix<double, Eigen::Dynamic, 1> deltas(n);
    for (std::size_t a = 0; a < n; ++a) deltas(a) = dir.dot(x - nodes[a]);
    auto res = newton_dual<1>(deltas, params.beta, tolerance, params.max_iter);
    sol.lambda = res.lambda(0) * dir;
    sol.p = res.state.p;
    sol.r = res.state.r(0) * dir;
    sol.J = res.state.J(0, 0) * dir * dir.transpose();
    sol.iterations = res.iterations;
    sol.objective_trace = std::move(res.trace);
    sol.converged = true;
    return sol;
  }

  MatX2 deltas(n, 2);
  for (std::size_t a = 0; a < n; ++a) deltas.row(a) = (x - nodes[a]).transpose();
  auto res = newton_dual<2>(deltas, params.beta, tolerance, params.max_iter);
  sol.lambda = res.lambda;
  sol.p = res.state.p;
  sol.r = res.state.r;
  sol.J = res.state.J;
  sol.iterations = res.iterations;
  sol.objective_trace = std::move(res.trace);
  sol.converged = true;
  return sol;
}

MatX2 shape_gradients(const LmeSolution& sol, const NodeSet2D& nodes, const Vec2& x) {
  if (!sol.converged) throw Error(ErrorCode::kInvalidArgument, "shape gradients need a converged solution");
  if (sol.affine_rank < 2) {
    throw Error(ErrorCode::kSingularHessian, "spatial derivatives are undefined on a rank-deficient node set");
  }
  const Mat2 Jinv = checked_inverse(sol.J);
  const std::size_t n = nodes.size();
  MatX2 grad(n, 2);
  for (std::size_t a = 0; a < n; ++a) {
    grad.row(a) = (-sol.p(a) * (Jinv * (x - nodes[a] - sol.r))).transpose();
  }
  return grad;
}

std::vector<Mat2> shape_hessians(const LmeSolution& sol, const MatX2& grad_p, const NodeSet2D& nodes,
                                 const Vec2& x) {
  if (!sol.converged) throw Error(ErrorCode::kInvalidArgument, "shape Hessians need a converged solution");
  if (sol.affine_rank < 2) {
    throw Error(ErrorCode::kSingularHessian, "spatial derivatives are undefined on a rank-deficient node set");
  }
  const std::size_t n = nodes.size();
  if (static_cast<std::size_t>(grad_p.rows()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "gradient array does not match the node set");
  }
  const Mat2 Jinv = checked_inverse(sol.J);
  // p is the exact solution at x - r, where the residual vanishes; differentiate
  // there. The r-terms of dJ then drop out and every moment identity is exact.
  const Vec2 xt = x - sol.r;

  // dJ[j](m, n) = d J_mn / d x_j, total derivative along lambda*(x):
  //   sum_a [p_a,j d_m d_n + p_a (delta_mj d_n + delta_nj d_m)]
  std::array<Mat2, 2> dJ{Mat2::Zero(), Mat2::Zero()};
  Vec2 mean_delta = Vec2::Zero();
  for (std::size_t a = 0; a < n; ++a) {
    const Vec2 d = xt - nodes[a];
    mean_delta += sol.p(a) * d;
    for (int j = 0; j < 2; ++j) dJ[j] += grad_p(a, j) * d * d.transpose();
  }
  for (int j = 0; j < 2; ++j) {
    const Vec2 ej = Vec2::Unit(j);
    dJ[j] += ej * mean_delta.transpose() + mean_delta * ej.transpose();
  }
  // d(J^{-1})_{ik} / d x_j = -J^{-1}_{im} dJ_{mn,j} J^{-1}_{nk}
  std::array<Mat2, 2> dJinv;
  for (int j = 0; j < 2; ++j) dJinv[j] = -Jinv * dJ[j] * Jinv;

  std::vector<Mat2> hess(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Vec2 d = xt - nodes[a];
    const Vec2 Jd = Jinv * d;
    Mat2 h;
    for (int j = 0; j < 2; ++j) {
      const Vec2 dJd = dJinv[j] * d;
      for (int i = 0; i < 2; ++i) {
        h(i, j) = -grad_p(a, j) * Jd(i) - sol.p(a) * Jinv(i, j) - sol.p(a) * dJd(i);
      }
    }
    hess[a] = 0.5 * (h + h.transpose());
  }
  return hess;
}

LmeSolution solve_lme_with_derivatives(const NodeSet2D& nodes, const Vec2& x, const LmeParams& params) {
  LmeSolution sol = solve_lme(nodes, x, params);
  sol.grad_p = shape_gradients(sol, nodes, x);
  sol.hess_p = shape_hessians(sol, sol.grad_p, nodes, x);
  return sol;
}

}  // namespace memlme
