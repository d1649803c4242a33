#include <benchmark/benchmark.h>

#include "baryfold/model.hpp"

using namespace baryfold;

namespace {

ModelSpace model_for(int kind, int n) {
  switch (kind) {
    case 0:
      return ModelSpace::hyperbolic(n);
    case 1:
      return ModelSpace::product(2, n - 2);
    default: {
      std::vector<double> alphas(static_cast<std::size_t>(n - 1), 1.0);
      alphas.back() = 0.5;
      return ModelSpace::horospherical(alphas);
    }
  }
}

IdealPoint some_ideal(const ModelSpace& m, Rng& rng) {
  switch (m.kind()) {
    case ModelKind::Hyperbolic:
      return m.ideal(rng.unit_vec(m.dim()));
    case ModelKind::Product:
      return m.ideal(rng.unit_vec(m.factor_dim(0)), rng.unit_vec(m.factor_dim(1)),
                     0.7);
    default:
      return m.ideal_end();
  }
}

void BM_Busemann(benchmark::State& state) {
  const ModelSpace m = model_for(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
  Rng rng(1);
  const Point x = m.kind() == ModelKind::Horospherical
                      ? m.point(rng.normal_vec(m.dim()))
                      : m.origin();
  const IdealPoint theta = some_ideal(m, rng);
  for (auto _ : state) benchmark::DoNotOptimize(m.busemann(x, theta));
}

void BM_HessBusemann(benchmark::State& state) {
  const ModelSpace m = ModelSpace::hyperbolic(static_cast<int>(state.range(0)));
  Rng rng(2);
  const Point x = m.point(0.4 * rng.unit_vec(m.dim()));
  const IdealPoint theta = m.ideal(rng.unit_vec(m.dim()));
  for (auto _ : state) benchmark::DoNotOptimize(m.hess_busemann(x, theta));
}

void BM_Geodesic(benchmark::State& state) {
  const ModelSpace m = model_for(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
  Rng rng(3);
  const Point x = m.kind() == ModelKind::Horospherical
                      ? m.point(rng.normal_vec(m.dim()))
                      : m.point(0.2 * rng.unit_vec(m.dim()));
  const TangentVector u = m.tangent(x, rng.unit_vec(m.dim()));
  for (auto _ : state) benchmark::DoNotOptimize(m.geodesic(x, u, 1.3));
}

void BM_LogMap(benchmark::State& state) {
  const ModelSpace m = model_for(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)));
  Rng rng(4);
  Vec a(m.dim()), b(m.dim());
  if (m.kind() == ModelKind::Horospherical) {
    a = rng.normal_vec(m.dim());
    b = rng.normal_vec(m.dim());
  } else {
    a = 0.3 * rng.unit_vec(m.dim());
    b = 0.4 * rng.unit_vec(m.dim());
  }
  const Point p = m.point(a), q = m.point(b);
  for (auto _ : state) benchmark::DoNotOptimize(m.log_map(p, q));
}

}  // namespace

BENCHMARK(BM_Busemann)->Args({0, 3})->Args({0, 6})->Args({1, 4})->Args({2, 3});
BENCHMARK(BM_HessBusemann)->Arg(3)->Arg(6);
BENCHMARK(BM_Geodesic)->Args({0, 3})->Args({1, 4})->Args({2, 3});
BENCHMARK(BM_LogMap)->Args({0, 3})->Args({1, 4})->Args({2, 3});

BENCHMARK_MAIN();
