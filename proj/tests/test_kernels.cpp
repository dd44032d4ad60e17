#include <doctest.h>
#include <omp.h>

#include <random>

#include "sae/datasets.hpp"
#include "sae/ensembling.hpp"
#include "sae/kernels.hpp"
#include "sae/metrics.hpp"

using namespace sae;

namespace {

template <class F>
auto with_threads(int n, F&& f) {
  const int before = omp_get_max_threads();
  omp_set_num_threads(n);
  auto out = f();
  omp_set_num_threads(before);
  return out;
}

std::vector<std::vector<double>> axes(int dims, int points) {
  std::vector<std::vector<double>> ax(static_cast<std::size_t>(dims));
  for (auto& a : ax)
    for (int i = 0; i < points; ++i) a.push_back(-3.0 + 6.0 * i / (points - 1));
  return ax;
}

MlpArchitecture tiny_classifier() {
  MlpArchitecture a;
  a.layer_sizes = {2, 2};
  a.bias = false;
  a.task = Task::classification;
  return a;
}

Dataset blobs() {
  SyntheticSpec s;
  s.name = "twoclass2d";
  s.n = 30;
  s.noise = 1.0;
  s.separation = 2.0;
  return generate_synthetic(s);
}

}  // namespace

TEST_CASE("sum: serial reference, parallel blocks, any thread count") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, kernels::kBlockSize - 1, kernels::kBlockSize,
                        std::size_t{100003}}) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    const double s = kernels::sum(v, Execution::serial);
    const double p1 = with_threads(1, [&] { return kernels::sum(v, Execution::parallel); });
    const double p4 = with_threads(4, [&] { return kernels::sum(v, Execution::parallel); });
    CHECK(p1 == p4);
    double mag = 0;
    for (double x : v) mag += std::abs(x);
    CHECK(std::abs(s - p1) <= 1e-13 * (mag + 1.0));
  }
}

TEST_CASE("grid indexing runs the last axis fastest") {
  const std::vector<std::vector<double>> ax{{0, 1}, {10, 20, 30}};
  CHECK(kernels::grid_size(ax) == 6);
  CHECK(kernels::grid_point(ax, 0) == Eigen::Vector2d(0, 10));
  CHECK(kernels::grid_point(ax, 2) == Eigen::Vector2d(0, 30));
  CHECK(kernels::grid_point(ax, 3) == Eigen::Vector2d(1, 10));
}

TEST_CASE("grid log joint: serial equals parallel elementwise") {
  const MlpArchitecture a = tiny_classifier();
  const Dataset d = blobs();
  const GaussianPrior prior = GaussianPrior::isotropic(4);
  const auto ax = axes(4, 9);
  const auto s = kernels::grid_log_joint(a, d, prior, ax, Execution::serial);
  const auto p = with_threads(3, [&] { return kernels::grid_log_joint(a, d, prior, ax, Execution::parallel); });
  CHECK(s == p);
  // spot check against the objective directly
  CHECK(s[1234] == log_likelihood(a, kernels::grid_point(ax, 1234), d) +
                       log_prior_density(prior, kernels::grid_point(ax, 1234)));
}

TEST_CASE("mixture_proba: serial reference and thread-count independence") {
  const MlpArchitecture a = tiny_classifier();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<ParamVector> pts(3000, ParamVector(4));
  std::vector<double> w(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (auto& v : pts[k]) v = normal(rng);
    w[k] = k % 7 == 0 ? 0.0 : std::abs(normal(rng));
  }
  double tot = 0;
  for (double x : w) tot += x;
  for (double& x : w) x /= tot;
  Matrix inputs(6, 2);
  for (auto& v : inputs.reshaped()) v = normal(rng);
  const Matrix s = kernels::mixture_proba(a, pts, w, inputs, Execution::serial);
  const Matrix p1 = with_threads(1, [&] { return kernels::mixture_proba(a, pts, w, inputs, Execution::parallel); });
  const Matrix p4 = with_threads(4, [&] { return kernels::mixture_proba(a, pts, w, inputs, Execution::parallel); });
  CHECK(p1 == p4);
  CHECK((s - p1).cwiseAbs().maxCoeff() <= 1e-13);
  for (Eigen::Index i = 0; i < s.rows(); ++i) CHECK(std::abs(s.row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("row-wise W2 matches the scalar metric") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Matrix a(50, 17), b(50, 23);
  for (auto& v : a.reshaped()) v = normal(rng);
  for (auto& v : b.reshaped()) v = normal(rng) + 0.3;
  const auto s = kernels::rowwise_wasserstein2(a, b, Execution::serial);
  const auto p = with_threads(4, [&] { return kernels::rowwise_wasserstein2(a, b, Execution::parallel); });
  CHECK(s == p);
  const Eigen::RowVectorXd r0 = a.row(0), q0 = b.row(0);
  CHECK(s[0] == wasserstein2({r0.data(), 17}, {q0.data(), 23}));
}

TEST_CASE("parallel ensemble training is independent of the thread count") {
  MlpArchitecture a;
  a.layer_sizes = {1, 4, 1};
  a.activation = Activation::tanh;
  a.task = Task::regression;
  a.noise_sigma = 0.2;
  SyntheticSpec spec;
  spec.name = "sine1d";
  spec.n = 20;
  const Dataset d = generate_synthetic(spec);
  const GaussianPrior prior = GaussianPrior::isotropic(a.parameter_count());
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 0.01;
  TrainConfig seq = cfg;
  seq.epochs = 2;
  const BudgetPlan plan = allocate_budget(60, 3, 10, 2);
  const Ensemble serial = train_sequential_anchored_ensemble(a, prior, d, plan, cfg, seq, ChainConfig{}, 5,
                                                             Execution::serial);
  const Ensemble par = with_threads(
      3, [&] { return train_sequential_anchored_ensemble(a, prior, d, plan, cfg, seq, ChainConfig{}, 5); });
  CHECK(serial.members == par.members);
}
