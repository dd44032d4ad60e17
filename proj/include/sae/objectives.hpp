#pragma once

#include "sae/nn.hpp"

namespace sae {

/// Factorized Gaussian prior N(mean, diag(std^2)).
struct GaussianPrior {
  ParamVector mean;
  ParamVector std;

  /// Same (mean, std) for every parameter.
  static GaussianPrior isotropic(std::size_t n, double mean = 0.0, double std = 1.0);

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }

  /// Throws ConfigError unless lengths agree and every std is positive and finite.
  void validate() const;
  void validate(const MlpArchitecture& arch) const;
};

/// N(center, diag(std^2)) with std shared with the prior.
struct AnchorDensity {
  const ParamVector& center;
  const ParamVector& std;
};

/// Sum_j log N(theta_j | mean_j, std_j^2).
double log_prior_density(const GaussianPrior& prior, const ParamVector& theta);

/// Sum_j log N(theta_j | center_j, std_j^2).
double log_anchor_density(const AnchorDensity& anchor, const ParamVector& theta);

/// -(log p(D | theta) + log p_anc(theta)), p_anc = N(anchor, Sigma_prior).
double anchored_loss(const MlpArchitecture& arch, const GaussianPrior& prior, const ParamVector& anchor,
                     const ParamVector& theta, const Dataset& data);

/// -grad log p(D | theta) + (theta - anchor) / std^2.
ParamVector grad_anchored_loss(const MlpArchitecture& arch, const GaussianPrior& prior,
                               const ParamVector& anchor, const ParamVector& theta, const Dataset& data);

/// Loss and gradient with the likelihood term multiplied by
/// `likelihood_scale`. Minibatch training passes n / batch_size so each
/// step is an unbiased estimate of the full-data objective.
ValueAndGradient anchored_loss_and_grad(const MlpArchitecture& arch, const GaussianPrior& prior,
                                        const ParamVector& anchor, const ParamVector& theta,
                                        const Dataset& data, double likelihood_scale = 1.0);

}  // namespace sae
