#pragma once

#include <cstdint>
#include <span>

#include "sae/ensembling.hpp"
#include "sae/execution.hpp"

namespace sae {

/// Per-input predictive distribution. Classification: n x K class
/// probabilities. Regression: n x S predictive samples.
struct PredictiveDensity {
  Task task = Task::classification;
  Matrix values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  void validate() const;
};

/// (1/N) sum_m p(y | x, theta_m). Regression draws `samples_per_member`
/// observations per member and input, pooled into n x (N * S).
PredictiveDensity ensemble_predictive(const Ensemble& ensemble, const Matrix& inputs,
                                      std::size_t samples_per_member, std::uint64_t seed,
                                      Execution exec = Execution::parallel);

/// Index of the largest entry; ties go to the lowest index.
Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Fraction of inputs on which the two argmax classes coincide.
double agreement(const Matrix& reference, const Matrix& approx);

/// Mean over inputs of half the L1 distance between the class distributions.
double total_variation(const Matrix& reference, const Matrix& approx);

/// 1-D empirical Wasserstein-2 distance. Both sample sets are sorted and
/// their inverse empirical CDFs compared at the M midpoints (k + 1/2) / M,
/// M = max of the two sizes. Equal sizes reduce to matching order statistics.
double wasserstein2(std::span<const double> p, std::span<const double> q);

/// Mean over inputs of the point-wise W2 between sample rows.
double regression_report(const PredictiveDensity& reference, const PredictiveDensity& approx,
                         Execution exec = Execution::parallel);

}  // namespace sae
