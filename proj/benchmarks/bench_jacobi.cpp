#include <benchmark/benchmark.h>

#include "baryfold/jacobi.hpp"
#include "baryfold/natural_map.hpp"

using namespace baryfold;

namespace {

void BM_JacobiBvp(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  Rng rng(1);
  const Point x = m.point(0.3 * rng.unit_vec(m.dim()));
  const IdealPoint theta = m.ideal(rng.unit_vec(m.dim()));
  const RayFrame ray = make_ray_frame(m, x, theta);
  Vec c = Vec::Zero(m.dim());
  c.tail(m.dim() - 1) = rng.unit_vec(m.dim() - 1);
  const TangentVector y0{x, ray.frame * c};
  const double horizon = static_cast<double>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_jacobi_bvp(m, ray, y0, horizon));
}

void BM_KeyEstimate(benchmark::State& state) {
  const ModelSpace m = ModelSpace::horospherical({1.0, 0.5});
  const int samples = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_key_estimate(m, samples, 20.0, 7));
}

void BM_NaturalMap(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  const VisualFamily family(m);
  Rng rng(2);
  const Point y = m.point(0.3 * rng.unit_vec(m.dim()));
  const SmoothMap id = SmoothMap::identity(m);
  NaturalMapOptions opts;
  opts.source_resolution = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(natural_map(id, family, y, 3.5, opts));
}

}  // namespace

BENCHMARK(BM_JacobiBvp)->Args({3, 20})->Args({6, 20})->Args({3, 40});
BENCHMARK(BM_KeyEstimate)->Arg(256)->Arg(1024);
BENCHMARK(BM_NaturalMap)->Args({2, 12})->Args({3, 8});

BENCHMARK_MAIN();
