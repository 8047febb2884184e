#include "memlme/protocols.hpp"

#include "memlme/generators.hpp"

namespace memlme {

PipelineConfig sinusoid_config(PipelineConfig cfg) {
  Window w;
  w.lo.head<2>().setConstant(0.5);
  w.hi.head<2>().setConstant(2.5);
  cfg.window = w;
  return cfg;
}

SinusoidResult run_sinusoid_benchmark(double h, const PipelineConfig& cfg) {
  const PointCloud cloud = generate_sinusoid_grid(0.0, 3.0, h);
  const CurvatureField field = run_field(SurfaceNodes(cloud), sinusoid_config(cfg));
  std::vector<MeanGauss> exact;
  exact.reserve(field.nodes.size());
  for (const NodeRecord& r : field.nodes) exact.push_back(curvature_of_sinusoid(r.position.head<2>()));

  SinusoidResult out;
  out.h = h;
  out.side = sinusoid_grid_side(0.0, 3.0, h);
  out.rmsd = rmsd_vs_reference(field, exact);
  out.evaluated = field.summary.evaluated;
  out.failed = static_cast<int>(field.summary.failed.size());
  return out;
}

SphereResult run_sphere_benchmark(int frequency, double radius, const PipelineConfig& cfg) {
  const TriMesh mesh = generate_geodesic_sphere(frequency, radius);
  SphereResult out;
  out.frequency = frequency;
  out.radius = radius;
  out.summary = run_field(SurfaceNodes(mesh), cfg).summary;
  return out;
}

}  // namespace memlme
