#include <benchmark/benchmark.h>

#include "tscaledgd/solvers.hpp"
#include "tscaledgd/synth.hpp"

using namespace tsgd;

namespace {

Method method_of(const benchmark::State& state) { return state.range(1) == 0 ? Method::kScaledGd : Method::kVanillaGd; }

}  // namespace

static void BM_RpcaStep(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(TransformKind::kDft, n);
  const GroundTruth gt = gen_ground_truth(n, n, n, 5, 10.0, tf, 1);
  const Tensor3 y = gt.xstar + gen_sparse_corruption(gt.xstar, 0.1, 2);
  const FactorPair f = perturb_factors(gt, 0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rpca_step(f, y, 0.01, 0.5, tf, method_of(state)));
}
BENCHMARK(BM_RpcaStep)->ArgsProduct({{16, 32, 50}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_CompletionStep(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(TransformKind::kDft, n);
  const GroundTruth gt = gen_ground_truth(n, n, n, 5, 10.0, tf, 1);
  const ObservationSet obs = gen_bernoulli_mask(n, n, n, 0.4, 2);
  const Tensor3 yobs = project_observed(gt.xstar, obs);
  const FactorPair f = perturb_factors(gt, 0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(completion_step(f, yobs, obs, 0.5, std::nullopt, tf, method_of(state)));
}
BENCHMARK(BM_CompletionStep)->ArgsProduct({{16, 32, 50}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_Dist(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(TransformKind::kDct, n);
  const GroundTruth gt = gen_ground_truth(n, n, n, 3, 10.0, tf, 1);
  const FactorPair f = perturb_factors(gt, 0.01, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dist(f, gt));
}
BENCHMARK(BM_Dist)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
