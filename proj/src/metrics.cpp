#include "sae/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sae/error.hpp"
#include "sae/kernels.hpp"

namespace sae {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError("predictive shape mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

void PredictiveDensity::validate() const {
  require(values.allFinite(), "predictive density has non-finite entries");
  if (task == Task::classification) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      require(values.row(i).minCoeff() >= 0.0 && values.row(i).maxCoeff() <= 1.0,
              "class probabilities outside [0, 1] at row " + std::to_string(i));
      require(std::abs(values.row(i).sum() - 1.0) <= 1e-9, "class probabilities do not sum to 1 at row " + std::to_string(i));
    }
  } else {
    require(values.cols() >= 1, "regression predictive needs at least one sample per input");
  }
}

PredictiveDensity ensemble_predictive(const Ensemble& ensemble, const Matrix& inputs,
                                      std::size_t samples_per_member, std::uint64_t seed, Execution exec) {
  require(ensemble.size() > 0, "ensemble_predictive on an empty ensemble");
  const MlpArchitecture& arch = ensemble.arch;
  require_length("input dimension", static_cast<std::size_t>(arch.input_dim()), static_cast<std::size_t>(inputs.cols()));
  PredictiveDensity out;
  out.task = arch.task;

  if (arch.task == Task::classification) {
    const std::vector<double> w(ensemble.size(), 1.0 / static_cast<double>(ensemble.size()));
    out.values = kernels::mixture_proba(arch, ensemble.members, w, inputs, exec);
    return out;
  }

  require(samples_per_member >= 1, "samples_per_member must be >= 1");
  const auto S = static_cast<Eigen::Index>(samples_per_member);
  const auto n = inputs.rows();
  out.values.resize(n, S * static_cast<Eigen::Index>(ensemble.size()));
  for_each_index(ensemble.size(), exec, [&](std::size_t m) {
    const Matrix mean = forward_batch(arch, ensemble.members[m], inputs);
    if (!mean.allFinite()) throw NumericError("member " + std::to_string(m) + " produced non-finite predictions");
    for (Eigen::Index i = 0; i < n; ++i) {
      Rng rng = make_rng(seed, "predictive", m, static_cast<std::uint64_t>(i));
      for (Eigen::Index s = 0; s < S; ++s) {
        out.values(i, static_cast<Eigen::Index>(m) * S + s) = mean(i, 0) + arch.noise_sigma * standard_normal(rng);
      }
    }
  });
  return out;
}

Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < row.size(); ++j) {
    if (row(j) > row(best)) best = j;
  }
  return best;
}

double agreement(const Matrix& reference, const Matrix& approx) {
  require_same_shape(reference, approx);
  require(reference.rows() > 0, "agreement needs at least one input");
  long long hits = 0;
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    if (argmax_lowest(reference.row(i)) == argmax_lowest(approx.row(i))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(reference.rows());
}

double total_variation(const Matrix& reference, const Matrix& approx) {
  require_same_shape(reference, approx);
  require(reference.rows() > 0, "total_variation needs at least one input");
  double total = 0.0;
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    total += 0.5 * (reference.row(i) - approx.row(i)).cwiseAbs().sum();
  }
  return total / static_cast<double>(reference.rows());
}

double wasserstein2(std::span<const double> p, std::span<const double> q) {
  require(!p.empty() && !q.empty(), "wasserstein2 needs two non-empty sample sets");
  std::vector<double> a(p.begin(), p.end());
  std::vector<double> b(q.begin(), q.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t M = std::max(a.size(), b.size());
  // Generalized inverse inf{x : F(x) >= t} at t = (2k + 1) / (2M) is the
  // order statistic ceil(t * size) - 1, in exact integer arithmetic.
  auto quantile = [](const std::vector<double>& v, std::size_t k, std::size_t levels) {
    const std::size_t num = (2 * k + 1) * v.size();
    return v[(num + 2 * levels - 1) / (2 * levels) - 1];
  };
  double acc = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const double d = quantile(a, k, M) - quantile(b, k, M);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(M));
}

double regression_report(const PredictiveDensity& reference, const PredictiveDensity& approx, Execution exec) {
  require_length("regression report inputs", reference.rows(), approx.rows());
  require(reference.rows() > 0, "regression report needs at least one input");
  const std::vector<double> w2 = kernels::rowwise_wasserstein2(reference.values, approx.values, exec);
  double total = 0.0;
  for (double v : w2) total += v;
  return total / static_cast<double>(w2.size());
}

}  // namespace sae
