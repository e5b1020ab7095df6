#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "chaosent/entropy.hpp"
#include "chaosent/interpolation.hpp"
#include "chaosent/knn.hpp"
#include "chaosent/malliavin.hpp"
#include "chaosent/rng.hpp"
#include "chaosent/sample_batch.hpp"

using namespace chaosent;

namespace {

void BM_KnnFitAndSweep(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  GaussianStream gs(11);
  Eigen::MatrixXd x(m, 1), y(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = gs.normal(static_cast<std::uint64_t>(i), 0);
    y(i, 0) = x(i, 0) * x(i, 0) + gs.normal(static_cast<std::uint64_t>(i), 1);
  }
  for (auto _ : state) {
    KnnRegressor reg(x, y);
    benchmark::DoNotOptimize(reg.conditional_second_moment());
  }
}
BENCHMARK(BM_KnnFitAndSweep)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SmoothedDensity(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  auto vec = ChaoticVector::from_components(
      {ChaosElement::hermite_term(1, 1, 2) * (1.0 / std::numbers::sqrt2)});
  auto batch = sample_batch(vec, m, 5);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(1, 1);
  auto pt = make_interpolation(batch.component_matrix(1), c, c, 0.5, 6);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_density(pt, x0));
}
BENCHMARK(BM_SmoothedDensity)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_DeBruijnEntropy(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  auto vec = ChaoticVector::from_components(
      {ChaosElement::hermite_term(1, 1, 2) * (1.0 / std::numbers::sqrt2)});
  QuadratureConfig quad;
  quad.core_nodes = 16;
  quad.edge_nodes = 8;
  quad.eps = 0.01;
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(1, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(de_bruijn_entropy(vec, c, m, 42, quad));
}
BENCHMARK(BM_DeBruijnEntropy)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
