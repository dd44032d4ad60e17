#include "sae/oracle.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "sae/error.hpp"
#include "sae/kernels.hpp"

namespace sae {

namespace {

double trapezoid_weight(const std::vector<std::vector<double>>& axes, std::size_t flat) {
  double w = 1.0;
  for (std::size_t d = axes.size(); d-- > 0;) {
    const auto& ax = axes[d];
    const std::size_t len = ax.size();
    const std::size_t i = flat % len;
    flat /= len;
    const double h = (ax.back() - ax.front()) / static_cast<double>(len - 1);
    w *= (i == 0 || i + 1 == len) ? 0.5 * h : h;
  }
  return w;
}

}  // namespace

void GaussianPosterior::validate() const {
  require_length("posterior covariance", static_cast<std::size_t>(mean.size()), static_cast<std::size_t>(covariance.rows()));
  require_length("posterior covariance", static_cast<std::size_t>(mean.size()), static_cast<std::size_t>(covariance.cols()));
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericError("posterior covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) throw NumericError("posterior covariance is not positive definite");
}

ParamVector GridPosterior::point(std::size_t flat) const { return kernels::grid_point(axes, flat); }

std::vector<double> GridPosterior::masses(Execution exec) const {
  std::vector<double> m(log_density.size());
  auto fill = [&](std::size_t k) { m[k] = trapezoid_weight(axes, k) * std::exp(log_density[k]); };
  if (exec == Execution::serial) {
    for (std::size_t k = 0; k < m.size(); ++k) fill(k);
  } else {
    const auto count = static_cast<long long>(m.size());
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < count; ++k) fill(static_cast<std::size_t>(k));
  }
  return m;
}

double GridPosterior::total_mass() const {
  const std::vector<double> m = masses();
  return kernels::sum(m, Execution::parallel);
}

ParamVector GridPosterior::mean() const {
  const std::vector<double> m = masses();
  ParamVector acc = ParamVector::Zero(static_cast<Eigen::Index>(axes.size()));
  for (std::size_t k = 0; k < m.size(); ++k) acc += m[k] * point(k);
  return acc / kernels::sum(m, Execution::parallel);
}

ParamVector GridPosterior::variance() const {
  const std::vector<double> m = masses();
  const ParamVector mu = mean();
  ParamVector acc = ParamVector::Zero(mu.size());
  for (std::size_t k = 0; k < m.size(); ++k) acc += m[k] * (point(k) - mu).cwiseAbs2();
  return acc / kernels::sum(m, Execution::parallel);
}

Matrix design_matrix(const MlpArchitecture& arch, const Matrix& inputs) {
  require(arch.layer_count() == 1 && arch.output_dim() == 1, "design_matrix needs a single-layer [d, 1] network");
  require_length("input dimension", static_cast<std::size_t>(arch.input_dim()), static_cast<std::size_t>(inputs.cols()));
  if (!arch.bias) return inputs;
  Matrix X(inputs.rows(), inputs.cols() + 1);
  X << inputs, Vector::Ones(inputs.rows());
  return X;
}

GaussianPosterior linear_posterior(const Matrix& X, const Vector& y, double noise_sigma, const GaussianPrior& prior) {
  prior.validate();
  require(noise_sigma > 0.0, "noise_sigma must be positive");
  require_length("design matrix columns", prior.size(), static_cast<std::size_t>(X.cols()));
  require_length("targets", static_cast<std::size_t>(X.rows()), static_cast<std::size_t>(y.size()));

  const double s2 = noise_sigma * noise_sigma;
  const Vector prior_precision = prior.std.array().square().inverse().matrix();
  Matrix A = X.transpose() * X / s2;
  A.diagonal() += prior_precision;
  const Vector rhs = X.transpose() * y / s2 + prior_precision.cwiseProduct(prior.mean);

  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NumericError("linear posterior precision is not positive definite");
  GaussianPosterior post;
  post.mean = llt.solve(rhs);
  post.covariance = llt.solve(Matrix::Identity(A.rows(), A.cols()));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose());
  post.validate();
  return post;
}

GridPosterior grid_posterior(const MlpArchitecture& arch, const Dataset& data, const GaussianPrior& prior,
                             const GridOptions& options, Execution exec) {
  arch.validate();
  prior.validate(arch);
  if (arch.parameter_count() > kMaxGridParameters) {
    throw ConfigError("grid posterior supports at most " + std::to_string(kMaxGridParameters) + " parameters, got " +
                      std::to_string(arch.parameter_count()) + "; use linear_posterior for linear-Gaussian models");
  }
  require(options.points_per_axis >= 3, "grid needs at least 3 points per axis");
  require(options.extent >= 4.0, "grid must cover at least 4 prior standard deviations per axis");

  GridPosterior g;
  const std::size_t P = arch.parameter_count();
  g.axes.resize(P);
  for (std::size_t j = 0; j < P; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double lo = prior.mean(jj) - options.extent * prior.std(jj);
    const double hi = prior.mean(jj) + options.extent * prior.std(jj);
    auto& ax = g.axes[j];
    ax.resize(static_cast<std::size_t>(options.points_per_axis));
    for (int i = 0; i < options.points_per_axis; ++i) {
      ax[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (options.points_per_axis - 1);
    }
  }

  g.log_density = kernels::grid_log_joint(arch, data, prior, g.axes, exec);
  const double peak = *std::max_element(g.log_density.begin(), g.log_density.end());
  if (!std::isfinite(peak)) throw NumericError("grid log joint is not finite");
  std::vector<double> scaled(g.log_density.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    scaled[k] = trapezoid_weight(g.axes, k) * std::exp(g.log_density[k] - peak);
  }
  g.log_normalizer = peak + std::log(kernels::sum(scaled, exec));
  for (double& v : g.log_density) v -= g.log_normalizer;
  return g;
}

PredictiveDensity reference_predictive(const GaussianPosterior& posterior, const Matrix& inputs,
                                       const MlpArchitecture& arch, std::size_t samples, std::uint64_t seed) {
  posterior.validate();
  require(samples >= 1, "reference predictive needs at least one sample");
  require_length("posterior", arch.parameter_count(), static_cast<std::size_t>(posterior.mean.size()));
  const Eigen::LLT<Matrix> llt(posterior.covariance);
  const Matrix L = llt.matrixL();

  Rng param_rng = make_rng(seed, "reference-params");
  std::vector<ParamVector> draws(samples);
  for (auto& d : draws) {
    Vector z(posterior.mean.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = standard_normal(param_rng);
    d = posterior.mean + L * z;
  }

  PredictiveDensity out;
  out.task = arch.task;
  if (arch.task == Task::classification) {
    const std::vector<double> w(samples, 1.0 / static_cast<double>(samples));
    out.values = kernels::mixture_proba(arch, draws, w, inputs, Execution::serial);
    return out;
  }
  const auto S = static_cast<Eigen::Index>(samples);
  out.values.resize(inputs.rows(), S);
  Rng noise_rng = make_rng(seed, "reference-noise");
  for (Eigen::Index s = 0; s < S; ++s) {
    const Matrix mean = forward_batch(arch, draws[static_cast<std::size_t>(s)], inputs);
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) out.values(i, s) = mean(i, 0) + arch.noise_sigma * standard_normal(noise_rng);
  }
  return out;
}

PredictiveDensity reference_predictive(const GridPosterior& posterior, const Matrix& inputs,
                                       const MlpArchitecture& arch, std::size_t samples, std::uint64_t seed,
                                       Execution exec) {
  require_length("grid posterior", arch.parameter_count(), posterior.axes.size());
  const std::vector<double> mass = posterior.masses(exec);
  const double total = kernels::sum(mass, exec);

  PredictiveDensity out;
  out.task = arch.task;
  if (arch.task == Task::classification) {
    // Points carrying less than 1e-16 of the mass contribute below rounding.
    std::vector<ParamVector> points;
    std::vector<double> weights;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      if (mass[k] > 1e-16 * total) {
        points.push_back(posterior.point(k));
        weights.push_back(mass[k]);
      }
    }
    const double kept = kernels::sum(weights, exec);
    for (double& w : weights) w /= kept;
    out.values = kernels::mixture_proba(arch, points, weights, inputs, exec);
    return out;
  }

  require(samples >= 1, "reference predictive needs at least one sample");
  std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
  const auto S = static_cast<Eigen::Index>(samples);
  out.values.resize(inputs.rows(), S);
  Rng rng = make_rng(seed, "reference-grid");
  for (Eigen::Index s = 0; s < S; ++s) {
    const Matrix mean = forward_batch(arch, posterior.point(pick(rng)), inputs);
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) out.values(i, s) = mean(i, 0) + arch.noise_sigma * standard_normal(rng);
  }
  return out;
}

}  // namespace sae
