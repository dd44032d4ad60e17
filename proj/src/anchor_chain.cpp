#include "sae/anchor_chain.hpp"

#include <cmath>

#include "sae/error.hpp"

namespace sae {

void Anchor::validate() const {
  require_length("anchor direction", static_cast<std::size_t>(theta.size()), direction.size());
  for (int d : direction) require(d == 1 || d == -1, "anchor direction entries must be -1 or +1");
}

void ChainConfig::validate() const {
  require(step_sigma > 0.0 && std::isfinite(step_sigma), "chain step_sigma must be positive");
}

double ChainConfig::step_for(const GaussianPrior& prior, std::size_t j) const {
  return relative_to_prior_std ? step_sigma * prior.std(static_cast<Eigen::Index>(j)) : step_sigma;
}

CoordinateStreams::CoordinateStreams(std::uint64_t seed, std::size_t n) {
  streams_.reserve(n);
  for (std::size_t j = 0; j < n; ++j) streams_.push_back(make_rng(seed, "anchor-coordinate", j));
}

ParamVector sample_prior(const GaussianPrior& prior, Rng& rng) {
  prior.validate();
  ParamVector out(prior.mean.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = prior.mean(j) + prior.std(j) * standard_normal(rng);
  return out;
}

ScalarStep guided_walk_step(double theta, int direction, double mean, double std, double step, double z,
                            double u) {
  const double y = theta + direction * std::abs(z) * step;
  const double a = (theta - mean) / std;
  const double b = (y - mean) / std;
  // p(y) / p(theta) for the scalar normal marginal.
  const double alpha = std::min(std::exp(0.5 * (a * a - b * b)), 1.0);
  if (u < alpha) return {y, direction, true};
  return {theta, -direction, false};
}

Anchor mh_update(const GaussianPrior& prior, const Anchor& anchor, const ChainConfig& cfg,
                 CoordinateStreams& streams) {
  require_length("anchor", prior.size(), static_cast<std::size_t>(anchor.theta.size()));
  require_length("coordinate streams", prior.size(), streams.size());
  Anchor next{ParamVector(anchor.theta.size()), std::vector<int>(anchor.direction.size())};
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Rng& rng = streams[j];
    const double z = standard_normal(rng);
    const double u = uniform01(rng);
    const ScalarStep s = guided_walk_step(anchor.theta(jj), anchor.direction[j], prior.mean(jj), prior.std(jj),
                                          cfg.step_for(prior, j), z, u);
    next.theta(jj) = s.theta;
    next.direction[j] = s.direction;
  }
  return next;
}

AnchorChain::AnchorChain(const GaussianPrior& prior, const ChainConfig& cfg)
    : prior_(&prior), cfg_(cfg), streams_(cfg.seed, prior.size()) {
  cfg.validate();
  Rng initial = make_rng(cfg.seed, "anchor-initial");
  anchor_.theta = sample_prior(prior, initial);
  anchor_.direction.resize(prior.size());
  for (std::size_t j = 0; j < prior.size(); ++j) anchor_.direction[j] = (streams_[j]() & 1U) ? 1 : -1;
}

const Anchor& AnchorChain::advance() {
  Anchor next = mh_update(*prior_, anchor_, cfg_, streams_);
  for (std::size_t j = 0; j < next.direction.size(); ++j) {
    if (next.direction[j] == anchor_.direction[j]) ++accepted_;
  }
  anchor_ = std::move(next);
  ++steps_;
  return anchor_;
}

double AnchorChain::acceptance_rate() const {
  const std::size_t proposals = steps_ * anchor_.direction.size();
  return proposals == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals);
}

std::vector<ParamVector> run_chain(const GaussianPrior& prior, std::size_t n_steps, const ChainConfig& cfg) {
  require(n_steps >= 1, "run_chain needs n_steps >= 1");
  AnchorChain chain(prior, cfg);
  std::vector<ParamVector> out;
  out.reserve(n_steps);
  out.push_back(chain.current().theta);
  for (std::size_t s = 1; s < n_steps; ++s) out.push_back(chain.advance().theta);
  return out;
}

}  // namespace sae
