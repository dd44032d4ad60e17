#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sae/error.hpp"
#include "sae/metrics.hpp"

using namespace sae;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix random_distributions(std::mt19937_64& rng, int n, int k) {
  std::gamma_distribution<double> g(0.7);
  Matrix m(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) m(i, j) = g(rng) + 1e-12;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// Quantile coupling written from the definition of the generalized inverse
// inf{x : F(x) >= t}, scanning the empirical CDF.
double quantile_w2(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t M = std::max(a.size(), b.size());
  auto q = [](const std::vector<double>& v, double t) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (static_cast<double>(i + 1) / static_cast<double>(v.size()) >= t - 1e-12) return v[i];
    }
    return v.back();
  };
  double acc = 0;
  for (std::size_t k = 0; k < M; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(M);
    acc += (q(a, t) - q(b, t)) * (q(a, t) - q(b, t));
  }
  return std::sqrt(acc / static_cast<double>(M));
}

MlpArchitecture classifier() {
  MlpArchitecture a;
  a.layer_sizes = {1, 2};
  a.task = Task::classification;
  return a;
}

}  // namespace

TEST_CASE("agreement examples") {
  const Matrix p = rows({{0.7, 0.3}, {0.2, 0.8}});
  CHECK(agreement(p, p) == 1.0);
  const Matrix q = rows({{0.9, 0.1}, {0.6, 0.4}});
  CHECK(agreement(p, q) == 0.5);
  CHECK(argmax_lowest(Eigen::RowVector3d(0.4, 0.4, 0.2)) == 0);
  CHECK(argmax_lowest(Eigen::RowVector3d(0.2, 0.4, 0.4)) == 1);
  CHECK(agreement(rows({{0.5, 0.5}}), rows({{0.6, 0.4}})) == 1.0);
  CHECK_THROWS_AS(agreement(p, rows({{1, 0}})), ConfigError);
}

TEST_CASE("total variation examples") {
  const Matrix p = rows({{0.6, 0.4}});
  CHECK(total_variation(p, p) == 0.0);
  CHECK(total_variation(p, rows({{0.5, 0.5}})) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(total_variation(rows({{1, 0}}), rows({{0, 1}})) == 1.0);
  CHECK_THROWS_AS(total_variation(p, rows({{0.5, 0.3, 0.2}})), ConfigError);
}

TEST_CASE("total variation is a metric row by row") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix a = random_distributions(rng, 1, 4);
    const Matrix b = random_distributions(rng, 1, 4);
    const Matrix c = random_distributions(rng, 1, 4);
    const double ab = total_variation(a, b);
    CHECK(ab == total_variation(b, a));
    CHECK(ab > 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= total_variation(a, c) + total_variation(c, b) + 1e-15);
    CHECK(total_variation(a, a) == 0.0);
  }
}

TEST_CASE("agreement only sees argmax patterns") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix p = random_distributions(rng, 10, 3);
    const Matrix q = random_distributions(rng, 10, 3);
    Matrix q2 = q;
    for (Eigen::Index i = 0; i < q2.rows(); ++i) {
      // shrink every non-argmax entry, then renormalize
      const Eigen::Index top = argmax_lowest(q2.row(i));
      for (Eigen::Index j = 0; j < q2.cols(); ++j)
        if (j != top) q2(i, j) *= u(rng);
      q2.row(i) /= q2.row(i).sum();
    }
    CHECK(agreement(p, q2) == agreement(p, q));
  }
}

TEST_CASE("wasserstein2 examples") {
  const std::vector<double> a{0.3, -1.2, 2.0, 0.0};
  CHECK(wasserstein2(a, a) == 0.0);
  CHECK(wasserstein2(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
  for (double c : {-2.5, 0.1, 7.0}) {
    std::vector<double> b = a;
    for (double& v : b) v += c;
    CHECK(wasserstein2(a, b) == doctest::Approx(std::abs(c)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(wasserstein2(std::vector<double>{}, a), ConfigError);
}

TEST_CASE("wasserstein2 equals the exhaustive permutation coupling") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  for (std::size_t s = 1; s <= 6; ++s) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> p(s), q(s);
      for (auto& v : p) v = normal(rng);
      for (auto& v : q) v = 2.0 * normal(rng) + 0.5;
      CHECK(wasserstein2(p, q) == doctest::Approx(oracle::brute_force_w2(p, q)).epsilon(1e-14));
    }
  }
}

TEST_CASE("wasserstein2 with unequal sizes follows the quantile grid") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> size(1, 9);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(static_cast<std::size_t>(size(rng))), q(static_cast<std::size_t>(size(rng)));
    for (auto& v : p) v = normal(rng);
    for (auto& v : q) v = normal(rng);
    CHECK(wasserstein2(p, q) == doctest::Approx(quantile_w2(p, q)).epsilon(1e-14));
    CHECK(wasserstein2(p, q) == doctest::Approx(wasserstein2(q, p)).epsilon(1e-14));
  }
  // duplicating every sample leaves the empirical measure unchanged
  const std::vector<double> p{1.0, 3.0, -2.0};
  const std::vector<double> q{0.5, 0.0, 4.0};
  const std::vector<double> qq{0.5, 0.0, 4.0, 0.5, 0.0, 4.0};
  CHECK(wasserstein2(p, qq) == doctest::Approx(wasserstein2(p, q)).epsilon(1e-14));
}

TEST_CASE("regression report") {
  PredictiveDensity ref{Task::regression, rows({{0.0, 1.0, 2.0}, {5.0, 5.0, 6.0}})};
  CHECK(regression_report(ref, ref) == 0.0);
  PredictiveDensity approx = ref;
  approx.values.row(0).array() += 0.1;
  approx.values.row(1).array() += 0.3;
  CHECK(regression_report(ref, approx) == doctest::Approx(0.2).epsilon(1e-14));
  approx = ref;
  approx.values.array() -= 1.25;
  CHECK(regression_report(ref, approx) == doctest::Approx(1.25).epsilon(1e-14));
  PredictiveDensity shorter{Task::regression, rows({{0.0}})};
  CHECK_THROWS_AS(regression_report(ref, shorter), ConfigError);
}

TEST_CASE("metrics are invariant to reordering the inputs") {
  std::mt19937_64 rng(8);
  const Matrix p = random_distributions(rng, 12, 3);
  const Matrix q = random_distributions(rng, 12, 3);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix pp(12, 3), qp(12, 3);
  for (int i = 0; i < 12; ++i) {
    pp.row(i) = p.row(perm[static_cast<std::size_t>(i)]);
    qp.row(i) = q.row(perm[static_cast<std::size_t>(i)]);
  }
  CHECK(agreement(pp, qp) == agreement(p, q));
  CHECK(total_variation(pp, qp) == doctest::Approx(total_variation(p, q)).epsilon(1e-14));
  PredictiveDensity a{Task::regression, p}, b{Task::regression, q};
  PredictiveDensity ap{Task::regression, pp}, bp{Task::regression, qp};
  CHECK(regression_report(ap, bp) == doctest::Approx(regression_report(a, b)).epsilon(1e-14));
}

TEST_CASE("ensemble predictive mixtures") {
  const MlpArchitecture arch = classifier();
  Ensemble e{arch, GaussianPrior::isotropic(arch.parameter_count()), {}, {}};
  CHECK_THROWS_AS(ensemble_predictive(e, Matrix::Zero(1, 1), 1, 0), ConfigError);

  // member logits (w x + b): x = 0 gives softmax(b)
  ParamVector m1(4), m2(4);
  m1 << 0, 0, 40, -40;
  m2 << 0, 0, -40, 40;
  e.members = {m1};
  e.provenance.resize(1);
  const Matrix x = Matrix::Zero(1, 1);
  const PredictiveDensity one = ensemble_predictive(e, x, 1, 0);
  CHECK((one.values.row(0) - predict_proba(arch, m1, x.row(0).transpose()).transpose()).cwiseAbs().maxCoeff() == 0.0);

  e.members = {m1, m2};
  e.provenance.resize(2);
  const PredictiveDensity two = ensemble_predictive(e, x, 1, 0);
  CHECK(two.values(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.values(0, 1) == doctest::Approx(0.5).epsilon(1e-15));

  ParamVector m3(4);
  m3 << 0.3, -1.0, 0.2, 0.1;
  Matrix inputs(5, 1);
  inputs << -2, -1, 0, 1, 2;
  e.members = {m3};
  e.provenance.resize(1);
  const Matrix single = ensemble_predictive(e, inputs, 1, 0).values;
  e.members.assign(7, m3);
  e.provenance.resize(7);
  const PredictiveDensity seven = ensemble_predictive(e, inputs, 1, 0);
  CHECK((seven.values - single).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_NOTHROW(seven.validate());
}

TEST_CASE("regression predictive pools N * S samples per input") {
  MlpArchitecture arch;
  arch.layer_sizes = {1, 1};
  arch.task = Task::regression;
  arch.noise_sigma = 0.5;
  Ensemble e{arch, GaussianPrior::isotropic(2), {}, {}};
  ParamVector a(2), b(2);
  a << 1.0, 0.0;
  b << -1.0, 2.0;
  e.members = {a, b};
  e.provenance.resize(2);
  Matrix inputs(2, 1);
  inputs << 0.0, 3.0;
  const PredictiveDensity p = ensemble_predictive(e, inputs, 4000, 3);
  REQUIRE(p.values.cols() == 8000);
  CHECK(p.task == Task::regression);
  // mixture of N(x, .25) and N(2 - x, .25): mean is 1 at every x
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double mean = p.values.row(i).mean();
    CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt((0.25 + std::pow(inputs(i, 0) - 1.0, 2)) / 8000.0));
  }
  CHECK(ensemble_predictive(e, inputs, 10, 3, Execution::serial).values ==
        ensemble_predictive(e, inputs, 10, 3, Execution::parallel).values);
}

TEST_CASE("predictive density validation") {
  PredictiveDensity bad{Task::classification, rows({{0.5, 0.6}})};
  CHECK_THROWS(bad.validate());
  PredictiveDensity neg{Task::classification, rows({{1.5, -0.5}})};
  CHECK_THROWS(neg.validate());
  PredictiveDensity inf{Task::regression, rows({{1.0, INFINITY}})};
  CHECK_THROWS(inf.validate());
}
