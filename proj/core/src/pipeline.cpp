#include "memlme/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace memlme {

std::string_view to_string(StencilRule rule) noexcept {
  return rule == StencilRule::kShell ? "shell" : "nearest";
}

StencilRule parse_stencil_rule(std::string_view name) {
  if (name == "shell") return StencilRule::kShell;
  if (name == "nearest") return StencilRule::kNearest;
  throw Error(ErrorCode::kInvalidArgument, "unknown stencil rule '" + std::string(name) + "'");
}

bool Window::contains(const Vec3& p) const {
  constexpr double slack = 1e-12;
  for (int i = 0; i < 3; ++i)
    if (p(i) < lo(i) - slack || p(i) > hi(i) + slack) return false;
  return true;
}

void PipelineConfig::validate() const {
  if (!(beta_bar >= 0) || !std::isfinite(beta_bar))
    throw Error(ErrorCode::kInvalidArgument, "beta_bar must be finite and >= 0");
  if (m < 5) throw Error(ErrorCode::kInvalidArgument, "m must be >= 5");
  if (!(spacing >= 0)) throw Error(ErrorCode::kInvalidArgument, "spacing must be >= 0");
  if (threads < 0) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 0");
  LmeParams{0.0, tol_factor, max_iter}.validate();
}

LocalNeighborhood stencil_for(const SurfaceNodes& nodes, int v, const PipelineConfig& cfg) {
  if (cfg.stencil == StencilRule::kNearest) return knn_neighborhood(nodes, v, cfg.m);
  const double h = cfg.spacing > 0 ? cfg.spacing : nodes.spacing();
  return ball_neighborhood(nodes, v, cfg.m * h);
}

double effective_beta(const LocalNeighborhood& neigh, double beta_bar) {
  if (neigh.planar.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two nodes");
  double d2 = 0.0;
  for (std::size_t a = 0; a < neigh.planar.size(); ++a)
    for (std::size_t b = a + 1; b < neigh.planar.size(); ++b)
      d2 = std::max(d2, (neigh.planar[a] - neigh.planar[b]).squaredNorm());
  if (d2 == 0.0) throw Error(ErrorCode::kInvalidArgument, "stencil has zero planar extent");
  return beta_bar / d2;
}

NodeEstimate estimate_node_curvature(const LocalNeighborhood& neigh, const PipelineConfig& cfg) {
  const NodeSet2D set(neigh.planar);
  const LmeParams params{effective_beta(neigh, cfg.beta_bar), cfg.tol_factor, cfg.max_iter};
  const Vec2 x = Vec2::Zero();
  const LmeSolution sol = solve_lme_with_derivatives(set, x, params);

  NodeEstimate out;
  out.beta = params.beta;
  out.iterations = sol.iterations;
  for (std::size_t a = 0; a < neigh.heights.size(); ++a) {
    const double z = neigh.heights[a];
    out.jet.z += z * sol.p(static_cast<Eigen::Index>(a));
    out.jet.grad += z * sol.grad_p.row(static_cast<Eigen::Index>(a)).transpose();
    out.jet.hess += z * sol.hess_p[a];
  }
  out.curvature = curvature_of(out.jet);
  return out;
}

FieldSummary summarize(const std::vector<NodeRecord>& nodes, std::optional<double> area) {
  FieldSummary s;
  s.evaluated = static_cast<int>(nodes.size());
  double sum_h = 0.0, sum_k = 0.0;
  for (const NodeRecord& r : nodes) {
    if (!r.ok) {
      s.failed.push_back(r.index);
      continue;
    }
    ++s.succeeded;
    sum_h += r.curvature.H;
    sum_k += r.curvature.K;
  }
  if (s.succeeded > 0) {
    s.mean_H = sum_h / s.succeeded;
    s.mean_K = sum_k / s.succeeded;
  }
  if (s.succeeded > 1) {
    double ssh = 0.0, ssk = 0.0;
    for (const NodeRecord& r : nodes) {
      if (!r.ok) continue;
      ssh += (r.curvature.H - s.mean_H) * (r.curvature.H - s.mean_H);
      ssk += (r.curvature.K - s.mean_K) * (r.curvature.K - s.mean_K);
    }
    s.sd_H = std::sqrt(ssh / (s.succeeded - 1));
    s.sd_K = std::sqrt(ssk / (s.succeeded - 1));
  }
  if (area) {
    s.area = area;
    s.total_K = s.mean_K * *area;
  }
  return s;
}

CurvatureField run_field(const SurfaceNodes& nodes, const PipelineConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.m) + 1 > nodes.size())
    throw Error(ErrorCode::kInsufficientNodes, "m + 1 = " + std::to_string(cfg.m + 1) + " exceeds " +
                                                   std::to_string(nodes.size()) + " nodes");

  std::vector<int> eval;
  if (!cfg.evaluation.empty()) {
    eval = cfg.evaluation;
    std::sort(eval.begin(), eval.end());
    eval.erase(std::unique(eval.begin(), eval.end()), eval.end());
    for (int v : eval)
      if (v < 0 || static_cast<std::size_t>(v) >= nodes.size())
        throw Error(ErrorCode::kInvalidArgument, "evaluation index out of range");
  } else {
    eval.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) eval[i] = static_cast<int>(i);
  }
  if (cfg.window)
    std::erase_if(eval, [&](int v) { return !cfg.window->contains(nodes.position(v)); });
  if (eval.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluation set is empty");

  CurvatureField field;
  field.nodes.resize(eval.size());
  auto work = [&](std::size_t i) {
    NodeRecord& rec = field.nodes[i];
    rec.index = eval[i];
    rec.position = nodes.position(rec.index);
    try {
      const LocalNeighborhood nb = stencil_for(nodes, rec.index, cfg);
      rec.stencil_size = static_cast<int>(nb.indices.size());
      const NodeEstimate est = estimate_node_curvature(nb, cfg);
      rec.curvature = est.curvature;
      rec.beta = est.beta;
      rec.iterations = est.iterations;
      rec.ok = true;
    } catch (const Error& e) {
      rec.error = e.code();
      rec.message = e.what();
    }
  };

  unsigned nthreads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  nthreads = std::clamp<unsigned>(nthreads, 1u, static_cast<unsigned>(eval.size()));
  if (nthreads == 1) {
    for (std::size_t i = 0; i < eval.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < eval.size(); i = next++) work(i);
      });
  }

  std::optional<double> area;
  if (nodes.mesh() && nodes.mesh()->is_closed()) area = nodes.mesh()->total_area();
  field.summary = summarize(field.nodes, area);
  const int failed = static_cast<int>(field.summary.failed.size());
  if (2 * failed > field.summary.evaluated)
    throw Error(ErrorCode::kTooManyFailures, std::to_string(failed) + " of " +
                                                 std::to_string(field.summary.evaluated) + " nodes failed");
  return field;
}

Rmsd rmsd_vs_reference(const CurvatureField& field, const std::vector<MeanGauss>& reference) {
  if (reference.size() != field.nodes.size())
    throw Error(ErrorCode::kMismatchedNodes, std::to_string(reference.size()) + " reference values for " +
                                                 std::to_string(field.nodes.size()) + " nodes");
  Rmsd out;
  double sh = 0.0, sk = 0.0;
  for (std::size_t i = 0; i < field.nodes.size(); ++i) {
    const NodeRecord& r = field.nodes[i];
    if (!r.ok) continue;
    const double dh = r.curvature.H - reference[i].H;
    const double dk = r.curvature.K - reference[i].K;
    sh += dh * dh;
    sk += dk * dk;
    ++out.count;
  }
  if (out.count > 0) {
    out.H = std::sqrt(sh / out.count);
    out.K = std::sqrt(sk / out.count);
  }
  return out;
}

std::vector<GridSample> sample_surface(const std::vector<Vec3>& points, const LmeParams& params,
                                       const GridSpec& grid) {
  if (grid.nx < 1 || grid.ny < 1) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  params.validate();
  std::vector<Vec2> planar;
  planar.reserve(points.size());
  for (const Vec3& p : points) planar.emplace_back(p.x(), p.y());
  const NodeSet2D set(std::move(planar));

  std::vector<GridSample> out;
  out.reserve(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  auto coord = [](double a, double b, int n, int i) { return n == 1 ? a : a + (b - a) * i / (n - 1); };
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      GridSample s{coord(grid.x0, grid.x1, grid.nx, i), coord(grid.y0, grid.y1, grid.ny, j),
                   std::numeric_limits<double>::quiet_NaN(), false};
      try {
        const LmeSolution sol = solve_lme(set, Vec2(s.x, s.y), params);
        double z = 0.0;
        for (std::size_t a = 0; a < points.size(); ++a) z += points[a].z() * sol.p(static_cast<Eigen::Index>(a));
        s.z = z;
        s.ok = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotInHull) throw;
      }
      out.push_back(s);
    }
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_curvature_csv(const CurvatureField& field, std::ostream& out) {
  out << "index,x,y,z,k1,k2,H,K,dir1_x,dir1_y,dir2_x,dir2_y,iterations,status\n";
  for (const NodeRecord& r : field.nodes) {
    out << r.index;
    const double vals[] = {r.position.x(),     r.position.y(),     r.position.z(),     r.curvature.k1,
                           r.curvature.k2,     r.curvature.H,      r.curvature.K,      r.curvature.dir1.x(),
                           r.curvature.dir1.y(), r.curvature.dir2.x(), r.curvature.dir2.y()};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      out << ',';
      if (r.ok || i < 3) put(out, vals[i]);  // failed nodes keep only their position
    }
    out << ',' << r.iterations << ',' << (r.ok ? std::string_view("ok") : to_string(*r.error)) << '\n';
  }
}

}  // namespace memlme
