// Serial reference vs OpenMP path for each kernel. The benchmark argument
// selects the path: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "sae/datasets.hpp"
#include "sae/ensembling.hpp"
#include "sae/kernels.hpp"

using namespace sae;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

MlpArchitecture classifier() {
  MlpArchitecture a;
  a.layer_sizes = {2, 2};
  a.bias = false;
  a.task = Task::classification;
  return a;
}

Dataset blobs(std::size_t n) {
  SyntheticSpec s;
  s.name = "twoclass2d";
  s.n = n;
  s.separation = 2.0;
  return generate_synthetic(s);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (auto& v : m.reshaped()) v = normal(rng);
  return m;
}

void BM_Sum(benchmark::State& state) {
  const Matrix m = gaussian(1, 1 << 20, 1);
  const std::span<const double> v(m.data(), static_cast<std::size_t>(m.size()));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sum(v, mode(state)));
  label(state);
}

void BM_GridLogJoint(benchmark::State& state) {
  const MlpArchitecture a = classifier();
  const Dataset d = blobs(20);
  const GaussianPrior prior = GaussianPrior::isotropic(4);
  std::vector<std::vector<double>> axes(4);
  for (auto& ax : axes)
    for (int i = 0; i < 21; ++i) ax.push_back(-5.0 + 0.5 * i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_log_joint(a, d, prior, axes, mode(state)));
  label(state);
}

void BM_MixtureProba(benchmark::State& state) {
  const MlpArchitecture a = classifier();
  const Matrix pts = gaussian(20000, 4, 2);
  std::vector<ParamVector> points;
  for (Eigen::Index k = 0; k < pts.rows(); ++k) points.emplace_back(pts.row(k).transpose());
  const std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
  const Matrix inputs = gaussian(100, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mixture_proba(a, points, w, inputs, mode(state)));
  label(state);
}

void BM_RowwiseW2(benchmark::State& state) {
  const Matrix a = gaussian(400, 1000, 4), b = gaussian(400, 1500, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::rowwise_wasserstein2(a, b, mode(state)));
  label(state);
}

void BM_SequentialEnsemble(benchmark::State& state) {
  const MlpArchitecture a = classifier();
  const Dataset d = blobs(20);
  const GaussianPrior prior = GaussianPrior::isotropic(4);
  TrainConfig init;
  init.epochs = 100;
  init.learning_rate = 0.05;
  TrainConfig seq = init;
  seq.epochs = 2;
  const BudgetPlan plan = allocate_budget(1000, 4, 100, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        train_sequential_anchored_ensemble(a, prior, d, plan, init, seq, ChainConfig{}, 1, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_Sum)->Arg(0)->Arg(1);
BENCHMARK(BM_GridLogJoint)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureProba)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowwiseW2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SequentialEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
