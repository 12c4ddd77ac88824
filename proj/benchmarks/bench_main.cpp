#include <benchmark/benchmark.h>

#include <cmath>

#include "geoscatter/dynamics/jacobi.hpp"
#include "geoscatter/dynamics/scattering.hpp"
#include "geoscatter/rigidity/boundary_distance.hpp"
#include "geoscatter/rigidity/embedding.hpp"
#include "geoscatter/transform/normal_operator.hpp"
#include "geoscatter/transform/xray.hpp"

namespace {

using namespace geoscatter;

MetricSpec scene(int kind) {
  MetricSpec m;
  switch (kind) {
    case 0: m.base = ConformalDisk{}; break;
    case 1: m.base = ConformalDisk{GaussianFactor{0.3, 0.5, Vec2(0.1, -0.05)}, 1.0}; break;
    case 2: m.base = PoincareDisk{0.8}; break;
    default: m.base = RevolutionStrip{Profile::cosh, 1.0}; break;
  }
  return m;
}

void BM_Scatter(benchmark::State& state) {
  const BoundaryChart chart = boundary_chart(scene(static_cast<int>(state.range(0))), 512);
  double s = 0.0;
  for (auto _ : state) {
    s = std::fmod(s + 0.618, chart.length());
    benchmark::DoNotOptimize(scatter_from_boundary(chart, s, 0.7));
  }
  state.SetLabel(chart.metric().describe());
}
BENCHMARK(BM_Scatter)->DenseRange(0, 3);

void BM_Jacobi(benchmark::State& state) {
  const MetricSpec m = scene(2);
  const UnitTangentVector z = make_unit(m, Vec2(-0.5, 0.1), Vec2(1.0, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_transport(m, z, 2.0, 0.0, 1.0));
}
BENCHMARK(BM_Jacobi);

void BM_Xray(benchmark::State& state) {
  const MetricSpec m = scene(1);
  const BoundaryChart chart = boundary_chart(m, 512);
  const ScalarField f = smooth_bump(Vec2(0.1, 0.2), 0.4);
  const BoundaryPoint p = chart.at(1.0);
  const UnitTangentVector z = make_unit(m, p.x, exit_direction(p, 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(xray(m, f, z));
}
BENCHMARK(BM_Xray);

void BM_Kernel(benchmark::State& state) {
  const MetricSpec m = scene(static_cast<int>(state.range(0)));
  const Vec2 x = m.is_revolution() ? Vec2(0.2, 1.0) : Vec2(0.1, -0.1);
  const Vec2 xp = x + Vec2(0.08, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(normal_operator_kernel(m, x, xp, 0.01));
  state.SetLabel(m.describe());
}
BENCHMARK(BM_Kernel)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_Embedding(benchmark::State& state) {
  MetricSpec m = scene(2);
  m.extension_margin = 0.12;
  if (state.range(0) == 1) m.pullback = TwistDiffeo{0.25, 0.4, 0.8};
  const CollarLayout layout = collar_layout(boundary_chart(scene(2), 512), 0.6);
  const CollarNodes nodes = collar_nodes(m, layout);
  for (auto _ : state) benchmark::DoNotOptimize(embed_collar(m, Vec2(0.2, 0.3), nodes));
  state.SetLabel(m.pullback ? "twisted" : "plain");
}
BENCHMARK(BM_Embedding)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);

void BM_ScatterTable(benchmark::State& state) {
  const BoundaryChart chart = boundary_chart(scene(2), 512);
  for (auto _ : state) benchmark::DoNotOptimize(scatter_table(chart, 16, 65));
}
BENCHMARK(BM_ScatterTable)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
