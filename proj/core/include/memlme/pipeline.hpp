#pragma once

// Per-node LME curvature estimation over sampled surfaces.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "memlme/error.hpp"
#include "memlme/lme.hpp"
#include "memlme/monge.hpp"
#include "memlme/neighborhood.hpp"

namespace memlme {

// How the stencil of a node is chosen.
//   kShell    every node within m typical spacings (3D distance), i.e. the
//             m-th order neighbourhood of the node
//   kNearest  the node plus its m nearest nodes
enum class StencilRule { kShell, kNearest };

std::string_view to_string(StencilRule rule) noexcept;
StencilRule parse_stencil_rule(std::string_view name);

// Axis-aligned box selecting evaluation nodes by position (inclusive).
struct Window {
  Vec3 lo = Vec3::Constant(-std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::infinity());
  bool contains(const Vec3& p) const;
};

struct PipelineConfig {
  double beta_bar = 100.0;
  int m = 10;
  double tol_factor = 1e-6;
  int max_iter = 100;
  StencilRule stencil = StencilRule::kShell;
  double spacing = 0.0;            // 0: use SurfaceNodes::spacing()
  std::optional<Window> window;    // evaluation sub-domain
  std::vector<int> evaluation;     // explicit node list; empty means all
  int threads = 0;                 // 0: hardware concurrency

  void validate() const;
};

LocalNeighborhood stencil_for(const SurfaceNodes& nodes, int v, const PipelineConfig& cfg);

// beta_bar / diam^2 with diam the largest pairwise planar distance.
double effective_beta(const LocalNeighborhood& neigh, double beta_bar);

struct NodeEstimate {
  CurvatureEstimate curvature;
  MongeJet2 jet;
  double beta = 0.0;
  int iterations = 0;
};

// LME fit of the stencil heights evaluated at the frame origin. Throws the
// solver's errors (NotInHull, SingularHessian, MaxIterExceeded, ...).
NodeEstimate estimate_node_curvature(const LocalNeighborhood& neigh, const PipelineConfig& cfg);

struct NodeRecord {
  int index = -1;
  Vec3 position = Vec3::Zero();
  CurvatureEstimate curvature;
  int stencil_size = 0;
  double beta = 0.0;
  int iterations = 0;
  bool ok = false;
  std::optional<ErrorCode> error;
  std::string message;
};

struct FieldSummary {
  int evaluated = 0;
  int succeeded = 0;
  double mean_H = 0.0, mean_K = 0.0;
  double sd_H = 0.0, sd_K = 0.0;  // sample standard deviation (n - 1)
  std::optional<double> area;     // closed meshes only
  std::optional<double> total_K;  // mean_K * area
  std::vector<int> failed;
};

struct CurvatureField {
  std::vector<NodeRecord> nodes;  // ascending node index
  FieldSummary summary;
};

// Statistics over the successful records, summed in record order.
FieldSummary summarize(const std::vector<NodeRecord>& nodes, std::optional<double> area);

// Estimates every node of the evaluation set. Per-node failures are kept
// in the records; throws Error{kTooManyFailures} if more than half fail.
CurvatureField run_field(const SurfaceNodes& nodes, const PipelineConfig& cfg);

struct Rmsd {
  double H = 0.0, K = 0.0;
  int count = 0;
};

// Root mean square deviation over the successful records. reference[i]
// belongs to field.nodes[i]. Throws Error{kMismatchedNodes}.
Rmsd rmsd_vs_reference(const CurvatureField& field, const std::vector<MeanGauss>& reference);

struct GridSpec {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int nx = 12, ny = 12;
};

struct GridSample {
  double x = 0, y = 0, z = 0;
  bool ok = false;
};

// z_N(x) = sum z_a p_a(x) using every node at fixed beta. Points outside
// the hull are returned with ok = false.
std::vector<GridSample> sample_surface(const std::vector<Vec3>& points, const LmeParams& params,
                                       const GridSpec& grid);

// index, x, y, z, k1, k2, H, K, dir1, dir2, iterations, status
void write_curvature_csv(const CurvatureField& field, std::ostream& out);

}  // namespace memlme
