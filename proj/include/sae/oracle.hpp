#pragma once

#include <cstdint>
#include <vector>

#include "sae/metrics.hpp"

namespace sae {

/// Exact posterior of a linear-Gaussian model.
struct GaussianPosterior {
  ParamVector mean;
  Matrix covariance;

  /// Throws NumericError unless the covariance is symmetric (1e-10) and
  /// Cholesky-factorizable.
  void validate() const;
};

/// Posterior on a tensor-product grid, normalized by trapezoid quadrature.
struct GridPosterior {
  std::vector<std::vector<double>> axes;
  /// Normalized log density at every grid point, last axis fastest.
  std::vector<double> log_density;
  /// log of the trapezoid integral of the unnormalized joint.
  double log_normalizer = 0.0;

  std::size_t size() const { return log_density.size(); }
  ParamVector point(std::size_t flat) const;
  /// Trapezoid weight times density at each point; sums to total_mass().
  std::vector<double> masses(Execution exec = Execution::parallel) const;
  double total_mass() const;
  ParamVector mean() const;
  ParamVector variance() const;
};

/// Design matrix of a single-layer [d, 1] network: inputs, plus a trailing
/// column of ones when the architecture has a bias.
Matrix design_matrix(const MlpArchitecture& arch, const Matrix& inputs);

/// Covariance A^-1 and mean A^-1 (X^T y / s^2 + P^-1 mu) with
/// A = X^T X / s^2 + P^-1, P the diagonal prior covariance.
GaussianPosterior linear_posterior(const Matrix& X, const Vector& y, double noise_sigma, const GaussianPrior& prior);

struct GridOptions {
  int points_per_axis = 401;
  /// Half-width of each axis in prior standard deviations.
  double extent = 5.0;
};

inline constexpr std::size_t kMaxGridParameters = 4;

/// Log joint on the tensor grid mean_j +- extent * std_j. At most four
/// parameters.
GridPosterior grid_posterior(const MlpArchitecture& arch, const Dataset& data, const GaussianPrior& prior,
                             const GridOptions& options = {}, Execution exec = Execution::parallel);

/// Classification: Monte Carlo average of predict_proba over S posterior
/// draws. Regression: S predictive samples (parameter draw plus noise) per
/// input.
PredictiveDensity reference_predictive(const GaussianPosterior& posterior, const Matrix& inputs,
                                       const MlpArchitecture& arch, std::size_t samples, std::uint64_t seed);

/// Classification: quadrature average of predict_proba over the grid.
/// Regression: S draws of a grid point by mass, plus observation noise.
PredictiveDensity reference_predictive(const GridPosterior& posterior, const Matrix& inputs,
                                       const MlpArchitecture& arch, std::size_t samples, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

}  // namespace sae
