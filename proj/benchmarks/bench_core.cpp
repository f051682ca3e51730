#include <benchmark/benchmark.h>

#include <memory>

#include "pdmm/init.hpp"
#include "pdmm/regularized.hpp"
#include "pdmm/solver.hpp"

using namespace pdmm;

namespace {

CVec random_signal(Index k, Rng& rng) {
  CVec x(k);
  for (Index i = 0; i < k; ++i) x[i] = Complex(rng.normal(), rng.normal());
  return x;
}

struct DenseFixture {
  std::shared_ptr<const SensingOperator> op;
  CVec x;
  CVec v;
  DenseFixture(Index n, Index k) {
    Rng rng(1);
    op = make_random_operator(n, k, rng);
    x = random_signal(k, rng);
    v = op->apply(x);
  }
};

struct MaskedFixture {
  std::shared_ptr<const SensingOperator> op;
  CVec x;
  CVec v;
  explicit MaskedFixture(Index side, int masks) {
    Rng rng(2);
    op = make_masked_dft_image_operator(side, masks, rng);
    x = random_signal(op->cols(), rng);
    v = op->apply(x);
  }
};

}  // namespace

static void BM_DenseApply(benchmark::State& state) {
  const DenseFixture fx(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fx.op->apply(fx.x));
}
BENCHMARK(BM_DenseApply)->Args({800, 20})->Args({4000, 100});

static void BM_DensePinv(benchmark::State& state) {
  const DenseFixture fx(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fx.op->pinv_apply(fx.v));
}
BENCHMARK(BM_DensePinv)->Args({800, 20})->Args({4000, 100});

static void BM_MaskedDftApply(benchmark::State& state) {
  const MaskedFixture fx(state.range(0), 21);
  for (auto _ : state) benchmark::DoNotOptimize(fx.op->apply(fx.x));
}
BENCHMARK(BM_MaskedDftApply)->Arg(32)->Arg(64);

static void BM_MaskedDftProjection(benchmark::State& state) {
  const MaskedFixture fx(state.range(0), 21);
  for (auto _ : state) benchmark::DoNotOptimize(fx.op->projection_apply(fx.v));
}
BENCHMARK(BM_MaskedDftProjection)->Arg(32)->Arg(64);

static void BM_DualStep(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  RVec y(n), b(n), c(n), h(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = rng.uniform(0.0, 50.0);
    b[i] = 0.1;
    c[i] = rng.uniform(-2.0, 2.0);
    h[i] = rng.uniform(0.0, 3.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(dual_step(y, b, c, h));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DualStep)->Arg(800)->Arg(100000);

static void BM_SolveDense(benchmark::State& state) {
  Rng rng(4);
  auto op = std::shared_ptr<const SensingOperator>(
      make_random_operator(state.range(0), state.range(1), rng));
  CVec x_true = random_signal(state.range(1), rng);
  x_true.normalize();
  x_true *= 12.0;
  RVec b = RVec::Constant(op->rows(), 0.1);
  const PoissonProblem problem = sample_measurements(op, x_true, b, rng);
  const InitResult init = initialize(problem);
  for (auto _ : state) {
    const SolveResult res = solve(problem, init.x0, init.z0);
    benchmark::DoNotOptimize(res.trace.outer_iters);
  }
}
BENCHMARK(BM_SolveDense)->Args({200, 10})->Args({800, 20})->Unit(benchmark::kMillisecond);

static void BM_SpectralInit(benchmark::State& state) {
  Rng rng(5);
  auto op = std::shared_ptr<const SensingOperator>(
      make_random_operator(800, 20, rng));
  CVec x_true = random_signal(20, rng);
  x_true.normalize();
  x_true *= 12.0;
  RVec b = RVec::Constant(op->rows(), 0.1);
  const PoissonProblem problem = sample_measurements(op, x_true, b, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_initialize(problem).iterations);
  }
  state.SetLabel("K=20 N=800");
}
BENCHMARK(BM_SpectralInit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
