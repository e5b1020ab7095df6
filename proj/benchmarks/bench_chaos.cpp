#include <benchmark/benchmark.h>

#include <cmath>

#include "chaosent/chaotic_vector.hpp"
#include "chaosent/hermite.hpp"
#include "chaosent/malliavin.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/sample_batch.hpp"

using namespace chaosent;

namespace {

ChaoticVector flat_chain(int n) {
  ChaosElement f(n);
  const double scale = 1.0 / std::sqrt(2.0 * n);
  for (int i = 1; i <= n; ++i) f.add_term(MultiIndex::single(i, 2), scale);
  return ChaoticVector::from_components({f});
}

void BM_HermiteEval(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermite_eval(order, x));
    x += 1e-9;
  }
}
BENCHMARK(BM_HermiteEval)->Arg(4)->Arg(8)->Arg(16);

void BM_ChaosProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vec = flat_chain(n);
  for (auto _ : state)
    benchmark::DoNotOptimize(chaos_product(vec.component(0), vec.component(0)));
}
BENCHMARK(BM_ChaosProduct)->Arg(4)->Arg(16)->Arg(64);

void BM_ExpectedNorm4(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vec = flat_chain(n);
  for (auto _ : state) benchmark::DoNotOptimize(expected_norm4(vec));
}
BENCHMARK(BM_ExpectedNorm4)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SteinCoupling(benchmark::State& state) {
  const auto vec = flat_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stein_coupling_exact(vec));
}
BENCHMARK(BM_SteinCoupling)->Arg(8)->Arg(32);

void BM_GaussianMatrix(benchmark::State& state) {
  GaussianStream gs(1234);
  const Eigen::Index rows = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(gs.matrix(rows, 8));
  state.SetItemsProcessed(state.iterations() * rows * 8);
}
BENCHMARK(BM_GaussianMatrix)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_EvaluateRows(benchmark::State& state) {
  const auto vec = flat_chain(static_cast<int>(state.range(0)));
  GaussianStream gs(7);
  const Eigen::MatrixXd rows = gs.matrix(20000, vec.basis_dim());
  for (auto _ : state) benchmark::DoNotOptimize(vec.component(0).evaluate_rows(rows));
  state.SetItemsProcessed(state.iterations() * rows.rows());
}
BENCHMARK(BM_EvaluateRows)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
