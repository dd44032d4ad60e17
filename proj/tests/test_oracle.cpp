#include <doctest.h>

#include "sae/datasets.hpp"
#include "sae/error.hpp"
#include "sae/oracle.hpp"

using namespace sae;

namespace {

MlpArchitecture linear(bool bias, double sigma = 0.5) {
  MlpArchitecture a;
  a.layer_sizes = {1, 1};
  a.task = Task::regression;
  a.noise_sigma = sigma;
  a.bias = bias;
  return a;
}

Dataset line_data(std::size_t n = 20) {
  SyntheticSpec s;
  s.name = "line1d";
  s.n = n;
  s.noise = 0.5;
  s.slope = 0.9;
  s.intercept = 0.3;
  s.seed = 12;
  return generate_synthetic(s);
}

}  // namespace

TEST_CASE("no data: the linear posterior is the prior") {
  GaussianPrior prior = GaussianPrior::isotropic(3, 0.5, 2.0);
  prior.std(1) = 0.3;
  const GaussianPosterior post = linear_posterior(Matrix::Zero(0, 3), Vector::Zero(0), 1.0, prior);
  CHECK((post.mean - prior.mean).cwiseAbs().maxCoeff() <= 1e-14);
  const Matrix want = prior.std.array().square().matrix().asDiagonal();
  CHECK((post.covariance - want).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("one observation: mean 0.5, variance 0.5") {
  const GaussianPosterior post =
      linear_posterior(Matrix::Ones(1, 1), Vector::Ones(1), 1.0, GaussianPrior::isotropic(1));
  CHECK(post.mean(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(post.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("vanishing likelihood precision recovers the prior") {
  const Dataset d = line_data();
  const MlpArchitecture a = linear(true);
  const GaussianPrior prior = GaussianPrior::isotropic(2, -0.2, 1.5);
  const Matrix X = design_matrix(a, d.inputs);
  double prev = INFINITY;
  for (double s : {1.0, 10.0, 100.0, 1e4}) {
    const GaussianPosterior post = linear_posterior(X, d.targets, s, prior);
    const Matrix prior_cov = prior.std.array().square().matrix().asDiagonal();
    const double gap = std::max((post.mean - prior.mean).cwiseAbs().maxCoeff(),
                                (post.covariance - prior_cov).cwiseAbs().maxCoeff());
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("posterior validation rejects asymmetric or indefinite covariances") {
  GaussianPosterior p{ParamVector::Zero(2), Matrix::Identity(2, 2)};
  CHECK_NOTHROW(p.validate());
  p.covariance(0, 1) = 0.1;
  CHECK_THROWS_AS(p.validate(), NumericError);
  p.covariance << 1, 2, 2, 1;
  CHECK_THROWS_AS(p.validate(), NumericError);
}

TEST_CASE("grid and closed-form posteriors agree") {
  const Dataset d = line_data();
  for (bool bias : {false, true}) {
    const MlpArchitecture a = linear(bias);
    const GaussianPrior prior = GaussianPrior::isotropic(a.parameter_count());
    const GaussianPosterior exact = linear_posterior(design_matrix(a, d.inputs), d.targets, a.noise_sigma, prior);
    const GridPosterior grid = grid_posterior(a, d, prior);
    CHECK(grid.total_mass() == doctest::Approx(1.0).epsilon(1e-3));
    const ParamVector m = grid.mean(), v = grid.variance();
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      CHECK(std::abs(m(j) - exact.mean(j)) <= 1e-3);
      CHECK(std::abs(v(j) - exact.covariance(j, j)) <= 1e-2 * exact.covariance(j, j));
    }
  }
}

TEST_CASE("grid posterior with no data is the prior") {
  const MlpArchitecture a = linear(true);
  GaussianPrior prior = GaussianPrior::isotropic(2, 0.4, 0.7);
  prior.std(1) = 1.9;
  Dataset empty;
  empty.inputs.resize(0, 1);
  empty.targets.resize(0);
  const GridPosterior g = grid_posterior(a, empty, prior);
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-3));
  const ParamVector m = g.mean(), v = g.variance();
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(std::abs(m(j) - prior.mean(j)) <= 1e-3);
    CHECK(std::abs(v(j) - prior.std(j) * prior.std(j)) <= 1e-2 * prior.std(j) * prior.std(j));
  }
}

TEST_CASE("doubling the grid resolution barely moves the mean") {
  const MlpArchitecture a = linear(true);
  const Dataset d = line_data(8);
  const GaussianPrior prior = GaussianPrior::isotropic(2);
  const ParamVector coarse = grid_posterior(a, d, prior, {201, 5.0}).mean();
  const ParamVector fine = grid_posterior(a, d, prior, {401, 5.0}).mean();
  CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("grid posterior limits") {
  MlpArchitecture big;
  big.layer_sizes = {2, 2};
  big.task = Task::classification;
  Dataset d;
  d.inputs = Matrix::Zero(1, 2);
  d.targets = Vector::Zero(1);
  try {
    grid_posterior(big, d, GaussianPrior::isotropic(6));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("linear_posterior") != std::string::npos);
  }
  CHECK_THROWS_AS(grid_posterior(linear(true), line_data(), GaussianPrior::isotropic(2), {101, 3.0}), ConfigError);
}

TEST_CASE("serial and parallel grids are identical") {
  const MlpArchitecture a = linear(true);
  const Dataset d = line_data();
  const GaussianPrior prior = GaussianPrior::isotropic(2);
  const GridPosterior s = grid_posterior(a, d, prior, {151, 5.0}, Execution::serial);
  const GridPosterior p = grid_posterior(a, d, prior, {151, 5.0}, Execution::parallel);
  CHECK(s.log_density.size() == p.log_density.size());
  double worst = 0;
  for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(s.log_density[k] - p.log_density[k]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("point-mass posterior gives the single-parameter predictive") {
  MlpArchitecture a;
  a.layer_sizes = {2, 3};
  a.task = Task::classification;
  a.bias = false;
  ParamVector mean(6);
  mean << 0.5, -1, 0.2, 1.3, -0.7, 0.0;
  const GaussianPosterior post{mean, Matrix::Identity(6, 6) * 1e-24};
  Matrix inputs(3, 2);
  inputs << 1, 0, -0.5, 2, 0.3, 0.3;
  const PredictiveDensity p = reference_predictive(post, inputs, a, 50, 1);
  CHECK_NOTHROW(p.validate());
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Vector want = predict_proba(a, mean, inputs.row(i).transpose());
    CHECK((p.values.row(i).transpose() - want).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("linear-Gaussian predictive samples are centred on x^T mean") {
  const MlpArchitecture a = linear(true);
  const Dataset d = line_data();
  const GaussianPrior prior = GaussianPrior::isotropic(2);
  const GaussianPosterior post = linear_posterior(design_matrix(a, d.inputs), d.targets, a.noise_sigma, prior);
  Matrix inputs(3, 1);
  inputs << -1.5, 0.0, 2.0;
  const std::size_t S = 20000;
  const PredictiveDensity p = reference_predictive(post, inputs, a, S, 4);
  REQUIRE(p.values.cols() == static_cast<Eigen::Index>(S));
  for (Eigen::Index i = 0; i < 3; ++i) {
    Eigen::Vector2d x(inputs(i, 0), 1.0);
    const double mu = x.dot(post.mean);
    const double var = x.dot(post.covariance * x) + a.noise_sigma * a.noise_sigma;
    const double got = p.values.row(i).mean();
    CHECK(std::abs(got - mu) <= 3.0 * std::sqrt(var / static_cast<double>(S)));
    const double sv = (p.values.row(i).array() - got).square().sum() / static_cast<double>(S - 1);
    CHECK(sv == doctest::Approx(var).epsilon(0.05));
  }
}

TEST_CASE("grid regression predictive matches the analytic predictive mean") {
  const MlpArchitecture a = linear(true);
  const Dataset d = line_data();
  const GaussianPrior prior = GaussianPrior::isotropic(2);
  const GaussianPosterior post = linear_posterior(design_matrix(a, d.inputs), d.targets, a.noise_sigma, prior);
  const GridPosterior g = grid_posterior(a, d, prior);
  Matrix inputs(2, 1);
  inputs << -1.0, 1.0;
  const std::size_t S = 20000;
  const PredictiveDensity p = reference_predictive(g, inputs, a, S, 5);
  for (Eigen::Index i = 0; i < 2; ++i) {
    Eigen::Vector2d x(inputs(i, 0), 1.0);
    const double mu = x.dot(post.mean);
    const double var = x.dot(post.covariance * x) + a.noise_sigma * a.noise_sigma;
    CHECK(std::abs(p.values.row(i).mean() - mu) <= 3.0 * std::sqrt(var / static_cast<double>(S)) + 1e-3);
  }
}

TEST_CASE("mirror-symmetric classification posterior predicts one half on the axis") {
  // data invariant under x -> -x with the labels swapped; so is the prior
  MlpArchitecture a;
  a.layer_sizes = {1, 2};
  a.task = Task::classification;
  Dataset d;
  d.inputs.resize(4, 1);
  d.inputs << -2.0, -0.5, 0.5, 2.0;
  d.targets.resize(4);
  d.targets << 0, 1, 0, 1;
  const GaussianPrior prior = GaussianPrior::isotropic(4);
  const GridPosterior g = grid_posterior(a, d, prior, {31, 5.0});
  Matrix inputs(3, 1);
  inputs << 0.0, -1.3, 1.3;
  const PredictiveDensity p = reference_predictive(g, inputs, a, 1, 0);
  CHECK_NOTHROW(p.validate());
  CHECK(p.values(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.values(1, 0) == doctest::Approx(p.values(2, 1)).epsilon(1e-9));
  CHECK(p.values(1, 0) != doctest::Approx(0.5));
}
