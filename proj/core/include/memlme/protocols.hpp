#pragma once

// The two reference experiments: a sinusoidal Monge patch with known
// curvature and a geodesic sphere.

#include <vector>

#include "memlme/pipeline.hpp"

namespace memlme {

// z = sin(x1^2 + x2) sampled on [0, 3]^2, evaluated on [0.5, 2.5]^2.
struct SinusoidResult {
  double h = 0.0;      // requested spacing
  int side = 0;        // nodes per grid side
  Rmsd rmsd;
  int evaluated = 0;
  int failed = 0;
};

PipelineConfig sinusoid_config(PipelineConfig cfg);
SinusoidResult run_sinusoid_benchmark(double h, const PipelineConfig& cfg);

struct SphereResult {
  int frequency = 0;
  double radius = 0.0;
  FieldSummary summary;
};

SphereResult run_sphere_benchmark(int frequency, double radius, const PipelineConfig& cfg);

}  // namespace memlme
