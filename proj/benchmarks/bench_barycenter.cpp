#include <benchmark/benchmark.h>

#include "baryfold/straightening.hpp"

using namespace baryfold;

namespace {

void BM_SphereQuadrature(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  const int resolution = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sphere_quadrature(m, resolution));
}

void BM_VisualBarycenter(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  const int resolution = static_cast<int>(state.range(1));
  const BoundaryMeasure ref = sphere_quadrature(m, resolution);
  const VisualFamily family(m);
  Rng rng(1);
  const Point x = m.point(0.5 * rng.unit_vec(m.dim()));
  const BoundaryMeasure nux = visual_measure(family, x, ref);
  for (auto _ : state) benchmark::DoNotOptimize(barycenter(m, nux));
  state.counters["nodes"] = static_cast<double>(ref.size());
}

void BM_Straighten(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  Rng rng(2);
  std::vector<Point> vertices;
  for (int i = 0; i <= m.dim(); ++i)
    vertices.push_back(m.point(0.5 * rng.uniform() * rng.unit_vec(m.dim())));
  StraighteningContext ctx(m, vertices, static_cast<int>(state.range(1)));
  Vec sq = Vec::Constant(m.dim() + 1, 1.0 / (m.dim() + 1.0));
  const SphericalPoint delta = spherical_point(sq.cwiseSqrt());
  for (auto _ : state) benchmark::DoNotOptimize(ctx.straighten(delta));
}

void BM_JacobianChain(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  Rng rng(3);
  std::vector<Point> vertices;
  for (int i = 0; i <= m.dim(); ++i)
    vertices.push_back(m.point(0.5 * rng.uniform() * rng.unit_vec(m.dim())));
  StraighteningContext ctx(m, vertices, static_cast<int>(state.range(1)));
  Vec sq = Vec::Constant(m.dim() + 1, 1.0 / (m.dim() + 1.0));
  const SphericalPoint delta = spherical_point(sq.cwiseSqrt());
  for (auto _ : state) benchmark::DoNotOptimize(ctx.jacobian_chain(delta));
}

}  // namespace

BENCHMARK(BM_SphereQuadrature)->Args({3, 16})->Args({4, 12})->Args({5, 8});
BENCHMARK(BM_VisualBarycenter)->Args({2, 24})->Args({3, 16})->Args({4, 12});
BENCHMARK(BM_Straighten)->Args({3, 16})->Args({4, 10});
BENCHMARK(BM_JacobianChain)->Args({3, 16})->Args({4, 10});

BENCHMARK_MAIN();
