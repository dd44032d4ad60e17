#include "sae/kernels.hpp"

#include "sae/error.hpp"
#include "sae/metrics.hpp"

namespace sae::kernels {

namespace {

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

double sum(std::span<const double> values, Execution exec) {
  if (exec == Execution::serial) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t blocks = block_count(values.size());
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t hi = std::min(values.size(), lo + kBlockSize);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

std::size_t grid_size(const std::vector<std::vector<double>>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

ParamVector grid_point(const std::vector<std::vector<double>>& axes, std::size_t flat) {
  ParamVector p(static_cast<Eigen::Index>(axes.size()));
  for (std::size_t d = axes.size(); d-- > 0;) {
    const std::size_t len = axes[d].size();
    p(static_cast<Eigen::Index>(d)) = axes[d][flat % len];
    flat /= len;
  }
  return p;
}

std::vector<double> grid_log_joint(const MlpArchitecture& arch, const Dataset& data, const GaussianPrior& prior,
                                   const std::vector<std::vector<double>>& axes, Execution exec) {
  require_length("grid axes", arch.parameter_count(), axes.size());
  data.check_compatible(arch);
  const std::size_t n = grid_size(axes);
  std::vector<double> out(n);
  auto eval = [&](std::size_t k) {
    const ParamVector theta = grid_point(axes, k);
    const double ll = data.size() > 0 ? log_likelihood(arch, theta, data) : 0.0;
    out[k] = ll + log_prior_density(prior, theta);
  };
  if (exec == Execution::serial) {
    for (std::size_t k = 0; k < n; ++k) eval(k);
  } else {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static, 256)
    for (long long k = 0; k < count; ++k) eval(static_cast<std::size_t>(k));
  }
  return out;
}

Matrix mixture_proba(const MlpArchitecture& arch, const std::vector<ParamVector>& points,
                     std::span<const double> weights, const Matrix& inputs, Execution exec) {
  require_length("mixture weights", points.size(), weights.size());
  const Matrix zero = Matrix::Zero(inputs.rows(), arch.output_dim());
  if (exec == Execution::serial) {
    Matrix acc = zero;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (weights[k] != 0.0) acc += weights[k] * predict_proba_batch(arch, points[k], inputs);
    }
    return acc;
  }
  const std::size_t blocks = block_count(points.size());
  std::vector<Matrix> partial(blocks, zero);
  for_each_index(blocks, Execution::parallel, [&](std::size_t b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = std::min(points.size(), lo + kBlockSize);
    for (std::size_t k = lo; k < hi; ++k) {
      if (weights[k] != 0.0) partial[b] += weights[k] * predict_proba_batch(arch, points[k], inputs);
    }
  });
  Matrix acc = zero;
  for (const auto& p : partial) acc += p;
  return acc;
}

std::vector<double> rowwise_wasserstein2(const Matrix& a, const Matrix& b, Execution exec) {
  require_length("predictive rows", static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.rows()));
  std::vector<double> out(static_cast<std::size_t>(a.rows()));
  auto row = [&](std::size_t i) {
    const Eigen::RowVectorXd ra = a.row(static_cast<Eigen::Index>(i));
    const Eigen::RowVectorXd rb = b.row(static_cast<Eigen::Index>(i));
    out[i] = wasserstein2({ra.data(), static_cast<std::size_t>(ra.size())},
                          {rb.data(), static_cast<std::size_t>(rb.size())});
  };
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < out.size(); ++i) row(i);
  } else {
    const auto count = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) row(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace sae::kernels
