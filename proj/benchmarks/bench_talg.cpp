#include <benchmark/benchmark.h>

#include "tscaledgd/synth.hpp"
#include "tscaledgd/talg.hpp"

using namespace tsgd;

namespace {

Tensor3 random_tensor(Index n1, Index n2, Index n3) {
  Tensor3 a(n1, n2, n3);
  a.flat().setRandom();
  return a;
}

TransformKind kind_of(const benchmark::State& state) {
  return state.range(1) == 0 ? TransformKind::kDft : TransformKind::kDct;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(kind_of(state), n);
  const Tensor3 a = random_tensor(n, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(tf.forward(a));
  state.SetItemsProcessed(state.iterations() * a.size());
}
BENCHMARK(BM_Forward)->ArgsProduct({{16, 32, 64}, {0, 1}});

static void BM_TProduct(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(kind_of(state), n);
  const Tensor3 a = random_tensor(n, 10, n);
  const Tensor3 b = random_tensor(10, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(t_product(a, b, tf));
}
BENCHMARK(BM_TProduct)->ArgsProduct({{16, 32, 64}, {0, 1}});

static void BM_TSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Transform tf = make_transform(kind_of(state), n);
  const Tensor3 a = random_tensor(n, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(t_svd(a, tf));
}
BENCHMARK(BM_TSvd)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
