#include <benchmark/benchmark.h>

#include "suprec/datagen.hpp"
#include "suprec/estimator.hpp"
#include "suprec/harness.hpp"
#include "suprec/linalg.hpp"

using namespace suprec;

namespace {

ProblemConfig bench_config(std::size_t n) {
  ProblemConfig cfg;
  cfg.d = 100;
  cfg.k = 10;
  cfg.m = 2;
  cfg.n = n;
  return cfg;
}

void BM_ProxyVariance(benchmark::State& state) {
  const auto inst = generate_instance(bench_config(static_cast<std::size_t>(state.range(0))), 0);
  for (auto _ : state) benchmark::DoNotOptimize(proxy_variance(inst.batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProxyVariance)->Arg(100)->Arg(1000)->Arg(10000);

void BM_TopK(benchmark::State& state) {
  Rng rng(1);
  std::normal_distribution<double> normal;
  ProxyVarianceEstimate e;
  e.values = Eigen::VectorXd(state.range(0));
  for (auto& v : e.values) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(topk_support(e, 10));
}
BENCHMARK(BM_TopK)->Arg(100)->Arg(10000);

void BM_Jacobi(benchmark::State& state) {
  Rng rng(2);
  std::normal_distribution<double> normal;
  const auto size = state.range(0);
  Eigen::MatrixXd g(size, size);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  const Eigen::MatrixXd s = g * g.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(s));
}
BENCHMARK(BM_Jacobi)->Arg(3)->Arg(16)->Arg(64);

void BM_RunTrial(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(cfg, t++));
}
BENCHMARK(BM_RunTrial)->Arg(500)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
