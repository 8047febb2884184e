#include "memlme/rigidity.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "memlme/error.hpp"

namespace memlme {
namespace {

constexpr double kInvalidEnergy = 1e-12;

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

DihedralEnergy dihedral_energy(const TriMesh& mesh, double D) {
  DihedralEnergy e;
  for (const Edge& edge : mesh.edges()) {
    if (!edge.interior()) continue;
    const Vec3 n0 = mesh.face_normal(edge.f0), n1 = mesh.face_normal(edge.f1);
    e.cosine_form += 1.0 - n0.dot(n1);
    e.norm_form += 0.5 * (n0 - n1).squaredNorm();
  }
  e.cosine_form *= D;
  e.norm_form *= D;
  if (std::abs(e.cosine_form - e.norm_form) > 1e-12 * std::max(1.0, std::abs(e.cosine_form)))
    throw Error(ErrorCode::kInvalidArgument, "dihedral energy forms disagree");
  return e;
}

std::vector<double> dihedral_energy_shares(const TriMesh& mesh, double D) {
  std::vector<double> share(mesh.num_vertices(), 0.0);
  for (const Edge& edge : mesh.edges()) {
    if (!edge.interior()) continue;
    const double term = 0.5 * D * (1.0 - mesh.face_normal(edge.f0).dot(mesh.face_normal(edge.f1)));
    share[static_cast<std::size_t>(edge.v0)] += term;
    share[static_cast<std::size_t>(edge.v1)] += term;
  }
  return share;
}

std::string_view to_string(BendingMode mode) noexcept {
  return mode == BendingMode::kClosedGenus0 ? "closed-genus0" : "general";
}

BendingMode parse_bending_mode(std::string_view name) {
  if (name == "closed-genus0") return BendingMode::kClosedGenus0;
  if (name == "general") return BendingMode::kGeneral;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

BendingEnergy continuum_bending_energy(const CurvatureField& field, const TriMesh& mesh, BendingMode mode) {
  if (mode == BendingMode::kClosedGenus0) {
    if (!mesh.is_closed() || mesh.euler_characteristic() != 2)
      throw Error(ErrorCode::kModeMismatch, "closed-genus0 mode needs a closed mesh with Euler characteristic 2");
    if (field.nodes.size() != mesh.num_vertices())
      throw Error(ErrorCode::kMismatchedNodes, "closed-genus0 mode needs every vertex in the field");
  }
  const std::vector<double> area = dual_areas(mesh);
  BendingEnergy e;
  double sum = 0.0;
  for (const NodeRecord& r : field.nodes) {
    if (r.index < 0 || static_cast<std::size_t>(r.index) >= mesh.num_vertices())
      throw Error(ErrorCode::kMismatchedNodes, "field node outside the mesh");
    if (!r.ok) {
      ++e.skipped;
      continue;
    }
    const double h2 = 4.0 * r.curvature.H * r.curvature.H;
    const double a = area[static_cast<std::size_t>(r.index)];
    sum += mode == BendingMode::kClosedGenus0 ? h2 * a : (h2 - 2.0 * r.curvature.K) * a;
  }
  e.value = mode == BendingMode::kClosedGenus0 ? 0.5 * (sum - 8.0 * std::numbers::pi) : 0.5 * sum;
  return e;
}

std::vector<RigidityRecord> kappa0_estimate(const Trajectory& traj, double D, const PipelineConfig& cfg,
                                            BendingMode mode) {
  traj.validate();
  if (traj.frames.empty()) throw Error(ErrorCode::kInvalidArgument, "trajectory has no frames");
  cfg.validate();

  std::vector<RigidityRecord> out;
  std::vector<Vec3> sum(traj.frames.front().size(), Vec3::Zero());
  const TriMesh topology(traj.frames.front(), traj.faces);
  const bool subset = !cfg.evaluation.empty() || cfg.window.has_value();
  double ratio_sum = 0.0;
  int valid = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += traj.frames[k][i];
    std::vector<Vec3> mean(sum);
    for (Vec3& p : mean) p /= static_cast<double>(k + 1);
    const TriMesh mesh = topology.with_positions(std::move(mean));

    RigidityRecord rec;
    rec.t = traj.times[k];
    const CurvatureField field = run_field(SurfaceNodes(mesh), cfg);
    rec.failed_nodes = static_cast<int>(field.summary.failed.size());
    if (subset) {
      const std::vector<double> share = dihedral_energy_shares(mesh, D);
      for (const NodeRecord& r : field.nodes) rec.E_dihedral += share[static_cast<std::size_t>(r.index)];
    } else {
      rec.E_dihedral = dihedral_energy(mesh, D).value();
    }
    rec.E_bend_unit = continuum_bending_energy(field, mesh, mode).value;
    rec.valid = rec.E_bend_unit > kInvalidEnergy;
    if (rec.valid) {
      rec.instantaneous_ratio = rec.E_dihedral / rec.E_bend_unit;
      ratio_sum += rec.instantaneous_ratio;
      ++valid;
    } else {
      rec.instantaneous_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    rec.running_kappa0 = valid ? ratio_sum / valid : std::numeric_limits<double>::quiet_NaN();
    out.push_back(rec);
  }
  if (valid == 0) throw Error(ErrorCode::kTooManyFailures, "no frame produced a positive bending energy");
  return out;
}

void write_rigidity_csv(const std::vector<RigidityRecord>& records, std::ostream& out) {
  out << "t,E_dihedral,E_bend_unit,instantaneous_ratio,running_kappa0,valid\n";
  for (const RigidityRecord& r : records) {
    put(out, r.t);
    for (double v : {r.E_dihedral, r.E_bend_unit, r.instantaneous_ratio, r.running_kappa0}) {
      out << ',';
      put(out, v);
    }
    out << ',' << (r.valid ? 1 : 0) << '\n';
  }
}

}  // namespace memlme
