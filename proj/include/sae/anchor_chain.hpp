#pragma once

#include <cstdint>
#include <vector>

#include "sae/objectives.hpp"
#include "sae/random.hpp"

namespace sae {

/// Anchor point plus the per-coordinate walking direction (each -1 or +1).
struct Anchor {
  ParamVector theta;
  std::vector<int> direction;

  void validate() const;
};

struct ChainConfig {
  /// Proposal scale. When `relative_to_prior_std` is set the step for
  /// coordinate j is step_sigma * prior.std[j].
  double step_sigma = 0.1;
  bool relative_to_prior_std = true;
  std::uint64_t seed = 0;

  void validate() const;
  double step_for(const GaussianPrior& prior, std::size_t j) const;
};

/// One independent random stream per parameter coordinate, derived from a
/// seed and the coordinate index.
class CoordinateStreams {
 public:
  CoordinateStreams(std::uint64_t seed, std::size_t n);

  Rng& operator[](std::size_t j) { return streams_[j]; }
  std::size_t size() const { return streams_.size(); }

 private:
  std::vector<Rng> streams_;
};

/// Independent draw theta_j ~ N(mean_j, std_j^2) for every coordinate.
ParamVector sample_prior(const GaussianPrior& prior, Rng& rng);

struct ScalarStep {
  double theta;
  int direction;
  bool accepted;
};

/// Scalar guided-walk transition with its randomness supplied explicitly:
/// propose theta + direction * |z| * step, accept iff u < min(p(y)/p(theta), 1)
/// under N(mean, std^2). Rejection keeps theta and flips the direction.
ScalarStep guided_walk_step(double theta, int direction, double mean, double std, double step, double z,
                            double u);

/// Guided-walk Metropolis-Hastings update, one scalar chain per coordinate.
/// Coordinate j consumes only streams[j].
Anchor mh_update(const GaussianPrior& prior, const Anchor& anchor, const ChainConfig& cfg,
                 CoordinateStreams& streams);

/// Stateful chain over anchors. The first anchor is a prior draw, the
/// initial directions are uniform on {-1, +1}; each advance() is one
/// mh_update. Everything is derived from cfg.seed.
class AnchorChain {
 public:
  AnchorChain(const GaussianPrior& prior, const ChainConfig& cfg);

  const Anchor& current() const { return anchor_; }
  const Anchor& advance();

  std::size_t steps() const { return steps_; }
  /// Fraction of accepted scalar proposals so far.
  double acceptance_rate() const;

 private:
  const GaussianPrior* prior_;
  ChainConfig cfg_;
  CoordinateStreams streams_;
  Anchor anchor_;
  std::size_t steps_ = 0;
  std::size_t accepted_ = 0;
};

/// n_steps anchors: a prior draw followed by n_steps - 1 guided-walk updates.
std::vector<ParamVector> run_chain(const GaussianPrior& prior, std::size_t n_steps, const ChainConfig& cfg);

}  // namespace sae
