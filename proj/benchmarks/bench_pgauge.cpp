#include "pgauge/conditions.hpp"
#include "pgauge/linprog.hpp"
#include "pgauge/rng.hpp"
#include "pgauge/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace pgauge;

namespace {

Matrix design(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  return rng.gaussian_matrix(n, p) / std::sqrt(static_cast<double>(n));
}

void BM_ProxLinf(benchmark::State& state) {
  Rng rng(1);
  const Vector v = rng.gaussian_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(prox_linf(v, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProxLinf)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_ProxSortedL1(benchmark::State& state) {
  const Index p = state.range(0);
  Rng rng(2);
  const Vector v = rng.gaussian_vector(p);
  const Vector w = Vector::LinSpaced(p, 2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(prox_sorted_l1(v, w, 0.3));
  state.SetComplexityN(p);
}
BENCHMARK(BM_ProxSortedL1)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_MinLinfLp(benchmark::State& state) {
  const Index p = state.range(0);
  const Index n = 2 * p / 3;
  const Matrix x = design(n, p, 3);
  const Vector target = x.leftCols(p / 2).rowwise().sum();
  for (auto _ : state) benchmark::DoNotOptimize(min_linf_representation(x, target));
}
BENCHMARK(BM_MinLinfLp)->Arg(15)->Arg(30)->Arg(60);

void BM_SolveSup(benchmark::State& state) {
  const Index p = state.range(0);
  const Index n = 2 * p / 3;
  const Matrix x = design(n, p, 4);
  Rng rng(5);
  const Vector y = x * Vector::Ones(p) * 5.0 + rng.gaussian_vector(n);
  const auto spec = GaugeSpec::sup_norm(p);
  const double lambda = 0.1 * (x.transpose() * y).lpNorm<1>();
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, x, y, lambda));
}
BENCHMARK(BM_SolveSup)->Arg(15)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_SolveL1(benchmark::State& state) {
  const Index p = state.range(0);
  const Matrix x = design(p / 2, p, 6);
  Vector beta = Vector::Zero(p);
  beta.head(p / 10).setConstant(3.0);
  Rng rng(7);
  const Vector y = x * beta + 0.1 * rng.gaussian_vector(p / 2);
  const auto spec = GaugeSpec::l1(p);
  const double lambda = 0.1 * (x.transpose() * y).lpNorm<Eigen::Infinity>();
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, x, y, lambda));
}
BENCHMARK(BM_SolveL1)->Arg(40)->Arg(160)->Arg(640)->Unit(benchmark::kMillisecond);

void BM_SolveTv(benchmark::State& state) {
  const Index p = state.range(0);
  const Matrix x = Matrix::Identity(p, p);
  Rng rng(8);
  Vector y = rng.gaussian_vector(p) * 0.2;
  y.tail(p / 2).array() += 1.0;
  const auto spec = GaugeSpec::total_variation(p);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec, x, y, 0.5));
}
BENCHMARK(BM_SolveTv)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
