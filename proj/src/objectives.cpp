#include "sae/objectives.hpp"

#include <cmath>

#include "sae/error.hpp"

namespace sae {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double gaussian_log_density(const ParamVector& theta, const ParamVector& center, const ParamVector& std) {
  require_length("parameter vector", static_cast<std::size_t>(center.size()), static_cast<std::size_t>(theta.size()));
  const auto z = ((theta - center).array() / std.array());
  return -0.5 * z.square().sum() - std.array().log().sum() - kHalfLog2Pi * static_cast<double>(theta.size());
}

void check_anchor(const GaussianPrior& prior, const ParamVector& anchor) {
  require_length("anchor", prior.size(), static_cast<std::size_t>(anchor.size()));
}

}  // namespace

GaussianPrior GaussianPrior::isotropic(std::size_t n, double mean, double std) {
  const auto len = static_cast<Eigen::Index>(n);
  return {ParamVector::Constant(len, mean), ParamVector::Constant(len, std)};
}

void GaussianPrior::validate() const {
  require_length("prior std", size(), static_cast<std::size_t>(std.size()));
  require(mean.allFinite(), "prior mean must be finite");
  for (Eigen::Index j = 0; j < std.size(); ++j) {
    require(std(j) > 0.0 && std::isfinite(std(j)), "prior std must be positive (coordinate " + std::to_string(j) + ")");
  }
}

void GaussianPrior::validate(const MlpArchitecture& arch) const {
  validate();
  require_length("prior", arch.parameter_count(), size());
}

double log_prior_density(const GaussianPrior& prior, const ParamVector& theta) {
  require_length("prior std", prior.size(), static_cast<std::size_t>(prior.std.size()));
  return gaussian_log_density(theta, prior.mean, prior.std);
}

double log_anchor_density(const AnchorDensity& anchor, const ParamVector& theta) {
  return gaussian_log_density(theta, anchor.center, anchor.std);
}

double anchored_loss(const MlpArchitecture& arch, const GaussianPrior& prior, const ParamVector& anchor,
                     const ParamVector& theta, const Dataset& data) {
  check_anchor(prior, anchor);
  const double ll = data.size() > 0 ? log_likelihood(arch, theta, data) : 0.0;
  return -(ll + log_anchor_density({anchor, prior.std}, theta));
}

ValueAndGradient anchored_loss_and_grad(const MlpArchitecture& arch, const GaussianPrior& prior,
                                        const ParamVector& anchor, const ParamVector& theta,
                                        const Dataset& data, double likelihood_scale) {
  check_anchor(prior, anchor);
  ValueAndGradient lik = log_likelihood_and_grad(arch, theta, data);
  ValueAndGradient out;
  out.value = -(likelihood_scale * lik.value + log_anchor_density({anchor, prior.std}, theta));
  out.gradient = -likelihood_scale * lik.gradient;
  out.gradient.array() += (theta - anchor).array() / prior.std.array().square();
  return out;
}

ParamVector grad_anchored_loss(const MlpArchitecture& arch, const GaussianPrior& prior,
                               const ParamVector& anchor, const ParamVector& theta, const Dataset& data) {
  return anchored_loss_and_grad(arch, prior, anchor, theta, data).gradient;
}

}  // namespace sae
