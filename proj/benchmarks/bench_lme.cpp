#include <cmath>
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "memlme/generators.hpp"
#include "memlme/lme.hpp"
#include "memlme/neighborhood.hpp"
#include "memlme/pipeline.hpp"

namespace {

using namespace memlme;

// Hexagonal rings around the origin, the shape of a typical stencil.
NodeSet2D hex_stencil(int rings) {
  std::vector<Vec2> pts{Vec2::Zero()};
  for (int k = 1; k <= rings; ++k)
    for (int s = 0; s < 6 * k; ++s) {
      const double t = 2 * std::numbers::pi * s / (6 * k) + 0.1 * k;
      pts.emplace_back(k * std::cos(t), k * std::sin(t));
    }
  return NodeSet2D(std::move(pts));
}

void BM_SolveLme(benchmark::State& state) {
  const NodeSet2D nodes = hex_stencil(static_cast<int>(state.range(0)));
  const double diam = nodes.diameter();
  const LmeParams params{100.0 / (diam * diam)};
  const Vec2 x(0.13, -0.07);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lme(nodes, x, params));
  state.counters["nodes"] = static_cast<double>(nodes.size());
}
BENCHMARK(BM_SolveLme)->DenseRange(1, 5);

void BM_SolveLmeWithDerivatives(benchmark::State& state) {
  const NodeSet2D nodes = hex_stencil(static_cast<int>(state.range(0)));
  const double diam = nodes.diameter();
  const LmeParams params{100.0 / (diam * diam)};
  const Vec2 x(0.13, -0.07);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lme_with_derivatives(nodes, x, params));
  state.counters["nodes"] = static_cast<double>(nodes.size());
}
BENCHMARK(BM_SolveLmeWithDerivatives)->DenseRange(1, 5);

void BM_RunFieldSphere(benchmark::State& state) {
  const TriMesh sphere = generate_geodesic_sphere(static_cast<int>(state.range(0)), 100.0);
  const SurfaceNodes nodes(sphere);
  PipelineConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_field(nodes, cfg));
  state.counters["nodes/s"] =
      benchmark::Counter(static_cast<double>(nodes.size()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_RunFieldSphere)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
