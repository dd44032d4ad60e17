#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sae/anchor_chain.hpp"
#include "sae/execution.hpp"
#include "sae/objectives.hpp"

namespace sae {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer o);
Optimizer parse_optimizer(const std::string& s);

struct TrainConfig {
  int epochs = 1;
  /// 0 or >= n means full batch.
  std::size_t batch_size = 0;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Minibatch shuffling.
  std::uint64_t seed = 0;
  /// SAE only: keep Adam moments from the previous member instead of resetting.
  bool carry_optimizer_state = false;

  void validate() const;
};

/// Adam moment estimates; unused by sgd.
struct OptimizerState {
  ParamVector first_moment;
  ParamVector second_moment;
  long long step = 0;
};

struct TrainResult {
  ParamVector params;
  /// Full-dataset anchored loss after each epoch.
  std::vector<double> loss_trace;
  OptimizerState state;
};

/// Minimizes the anchored loss from `init` with cfg.epochs passes of
/// minibatch gradient descent. The likelihood of a batch of size b is scaled
/// by n / b. An empty dataset trains the anchor term alone (one step per
/// epoch). Throws NumericError naming the epoch if the loss stops being
/// finite.
TrainResult train(const MlpArchitecture& arch, const GaussianPrior& prior, const ParamVector& anchor,
                  const ParamVector& init, const Dataset& data, const TrainConfig& cfg,
                  const OptimizerState* resume = nullptr);

/// Epoch budget split into chains of one long and m short trainings.
struct BudgetPlan {
  long long total_epochs = 0;       // B
  long long chains = 0;             // C
  long long initial_epochs = 0;     // E0
  long long sequential_epochs = 0;  // Es
  long long members_per_chain_after_first = 0;  // m
  long long total_members = 0;                  // C * (1 + m)

  long long used_epochs() const { return chains * (initial_epochs + members_per_chain_after_first * sequential_epochs); }
};

/// m = floor((B / C - E0) / Es). Throws ConfigError when B < C * E0.
BudgetPlan allocate_budget(long long total_epochs, long long chains, long long initial_epochs,
                           long long sequential_epochs);

/// Members an AE run affords: floor(B / epochs_per_member), >= 1.
long long anchored_member_count(long long total_epochs, long long epochs_per_member);

struct MemberProvenance {
  int chain = 0;
  int index = 0;  // position within its chain
  ParamVector anchor;
  int epochs = 0;
  double final_loss = 0.0;
  bool warm_started = false;
  bool carried_optimizer_state = false;
  std::vector<double> loss_trace;
};

struct Ensemble {
  MlpArchitecture arch;
  GaussianPrior prior;
  std::vector<ParamVector> members;
  std::vector<MemberProvenance> provenance;

  std::size_t size() const { return members.size(); }
  long long total_epochs() const;
  void validate() const;
};

/// Seed of chain c (SAE) or member c (AE) under a master seed. AE member i and
/// SAE chain i share their first anchor and initialization.
std::uint64_t chain_seed(std::uint64_t master, std::size_t chain);

/// Standard anchored ensemble: N members, each on a fresh prior anchor from a
/// fresh initialization. Members run in parallel.
Ensemble train_anchored_ensemble(const MlpArchitecture& arch, const GaussianPrior& prior, const Dataset& data,
                                 std::size_t members, const TrainConfig& cfg, std::uint64_t seed,
                                 Execution exec = Execution::parallel);

/// Sequential anchored ensembling. Per chain: long training on a prior
/// anchor, then m rounds of {guided-walk anchor update, warm start from the
/// previous optimum, short training}. Chains run in parallel and are merged
/// in chain order.
Ensemble train_sequential_anchored_ensemble(const MlpArchitecture& arch, const GaussianPrior& prior,
                                            const Dataset& data, const BudgetPlan& plan,
                                            const TrainConfig& initial_cfg, const TrainConfig& sequential_cfg,
                                            const ChainConfig& chain_cfg, std::uint64_t seed,
                                            Execution exec = Execution::parallel);

}  // namespace sae
