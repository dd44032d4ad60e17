#include "sae/ensembling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sae/error.hpp"

namespace sae {

std::string to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }

Optimizer parse_optimizer(const std::string& s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + s + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "adam betas must lie in [0, 1)");
  require(adam_epsilon > 0.0, "adam epsilon must be positive");
}

namespace {

class Stepper {
 public:
  Stepper(const TrainConfig& cfg, Eigen::Index n, const OptimizerState* resume) : cfg_(cfg) {
    if (resume && resume->first_moment.size() == n) {
      state_ = *resume;
    } else {
      state_.first_moment = ParamVector::Zero(n);
      state_.second_moment = ParamVector::Zero(n);
    }
  }

  void step(ParamVector& theta, const ParamVector& grad) {
    if (cfg_.optimizer == Optimizer::sgd) {
      theta -= cfg_.learning_rate * grad;
      return;
    }
    ++state_.step;
    state_.first_moment = cfg_.beta1 * state_.first_moment + (1.0 - cfg_.beta1) * grad;
    state_.second_moment = cfg_.beta2 * state_.second_moment + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(state_.step));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(state_.step));
    theta.array() -= cfg_.learning_rate * (state_.first_moment.array() / c1) /
                     ((state_.second_moment.array() / c2).sqrt() + cfg_.adam_epsilon);
  }

  OptimizerState release() { return std::move(state_); }

 private:
  const TrainConfig& cfg_;
  OptimizerState state_;
};

}  // namespace

TrainResult train(const MlpArchitecture& arch, const GaussianPrior& prior, const ParamVector& anchor,
                  const ParamVector& init, const Dataset& data, const TrainConfig& cfg,
                  const OptimizerState* resume) {
  cfg.validate();
  prior.validate(arch);
  require_length("initial parameters", arch.parameter_count(), static_cast<std::size_t>(init.size()));
  require_length("anchor", arch.parameter_count(), static_cast<std::size_t>(anchor.size()));
  data.check_compatible(arch);

  const std::size_t n = data.size();
  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
  Rng shuffle = make_rng(cfg.seed, "shuffle");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult res;
  res.params = init;
  res.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
  Stepper stepper(cfg, init.size(), resume);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    try {
      if (full_batch) {
        const ValueAndGradient g = anchored_loss_and_grad(arch, prior, anchor, res.params, data);
        stepper.step(res.params, g.gradient);
      } else {
        std::shuffle(order.begin(), order.end(), shuffle);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
          const std::size_t stop = std::min(n, start + cfg.batch_size);
          const Dataset batch = data.subset({order.begin() + static_cast<long>(start),
                                             order.begin() + static_cast<long>(stop)});
          const double scale = static_cast<double>(n) / static_cast<double>(stop - start);
          const ValueAndGradient g = anchored_loss_and_grad(arch, prior, anchor, res.params, batch, scale);
          stepper.step(res.params, g.gradient);
        }
      }
      const double loss = anchored_loss(arch, prior, anchor, res.params, data);
      if (!std::isfinite(loss)) throw NumericError("non-finite anchored loss");
      res.loss_trace.push_back(loss);
    } catch (const NumericError& e) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  res.state = stepper.release();
  return res;
}

BudgetPlan allocate_budget(long long total_epochs, long long chains, long long initial_epochs,
                           long long sequential_epochs) {
  require(total_epochs >= 1 && chains >= 1 && initial_epochs >= 1 && sequential_epochs >= 1,
          "budget, chains and epoch counts must be positive");
  if (total_epochs < chains * initial_epochs) {
    throw ConfigError("budget of " + std::to_string(total_epochs) + " epochs cannot fit " + std::to_string(chains) +
                      " initial trainings of " + std::to_string(initial_epochs) + " epochs");
  }
  BudgetPlan plan;
  plan.total_epochs = total_epochs;
  plan.chains = chains;
  plan.initial_epochs = initial_epochs;
  plan.sequential_epochs = sequential_epochs;
  // floor((B/C - E0) / Es) in exact integer arithmetic.
  plan.members_per_chain_after_first = (total_epochs - chains * initial_epochs) / (chains * sequential_epochs);
  plan.total_members = chains * (1 + plan.members_per_chain_after_first);
  return plan;
}

long long anchored_member_count(long long total_epochs, long long epochs_per_member) {
  require(epochs_per_member >= 1, "epochs per member must be positive");
  const long long n = total_epochs / epochs_per_member;
  require(n >= 1, "budget of " + std::to_string(total_epochs) + " epochs is below one member of " +
                      std::to_string(epochs_per_member) + " epochs");
  return n;
}

long long Ensemble::total_epochs() const {
  long long total = 0;
  for (const auto& p : provenance) total += p.epochs;
  return total;
}

void Ensemble::validate() const {
  arch.validate();
  prior.validate(arch);
  require_length("ensemble provenance", members.size(), provenance.size());
  for (const auto& m : members) require_length("ensemble member", arch.parameter_count(), static_cast<std::size_t>(m.size()));
}

std::uint64_t chain_seed(std::uint64_t master, std::size_t chain) { return derive_seed(master, "chain", chain); }

namespace {

ChainConfig seeded_chain(const ChainConfig& base, std::uint64_t chain_seed_value) {
  ChainConfig c = base;
  c.seed = derive_seed(chain_seed_value, "anchor");
  return c;
}

TrainConfig seeded_train(const TrainConfig& base, std::uint64_t chain_seed_value, std::size_t member) {
  TrainConfig c = base;
  c.seed = derive_seed(chain_seed_value, "shuffle", member);
  return c;
}

MemberProvenance make_provenance(int chain, int index, const ParamVector& anchor, const TrainConfig& cfg,
                                 TrainResult& res, bool warm, bool carried) {
  MemberProvenance p;
  p.chain = chain;
  p.index = index;
  p.anchor = anchor;
  p.epochs = cfg.epochs;
  p.final_loss = res.loss_trace.back();
  p.warm_started = warm;
  p.carried_optimizer_state = carried;
  p.loss_trace = std::move(res.loss_trace);
  return p;
}

struct ChainOutput {
  std::vector<ParamVector> members;
  std::vector<MemberProvenance> provenance;
};

}  // namespace

Ensemble train_anchored_ensemble(const MlpArchitecture& arch, const GaussianPrior& prior, const Dataset& data,
                                 std::size_t members, const TrainConfig& cfg, std::uint64_t seed, Execution exec) {
  arch.validate();
  prior.validate(arch);
  cfg.validate();
  require(members >= 1, "anchored ensemble needs at least one member");

  std::vector<ChainOutput> outputs(members);
  for_each_index(members, exec, [&](std::size_t i) {
    const std::uint64_t cs = chain_seed(seed, i);
    const AnchorChain chain(prior, seeded_chain(ChainConfig{}, cs));
    Rng init_rng = make_rng(cs, "init");
    const ParamVector init = initialize(arch, init_rng);
    const TrainConfig member_cfg = seeded_train(cfg, cs, 0);
    try {
      TrainResult res = train(arch, prior, chain.current().theta, init, data, member_cfg);
      outputs[i].members.push_back(res.params);
      outputs[i].provenance.push_back(
          make_provenance(static_cast<int>(i), 0, chain.current().theta, member_cfg, res, false, false));
    } catch (const NumericError& e) {
      throw NumericError("member " + std::to_string(i) + ": " + e.what());
    }
  });

  Ensemble ens{arch, prior, {}, {}};
  for (auto& o : outputs) {
    ens.members.push_back(std::move(o.members.front()));
    ens.provenance.push_back(std::move(o.provenance.front()));
  }
  return ens;
}

Ensemble train_sequential_anchored_ensemble(const MlpArchitecture& arch, const GaussianPrior& prior,
                                            const Dataset& data, const BudgetPlan& plan,
                                            const TrainConfig& initial_cfg, const TrainConfig& sequential_cfg,
                                            const ChainConfig& chain_cfg, std::uint64_t seed, Execution exec) {
  arch.validate();
  prior.validate(arch);
  initial_cfg.validate();
  sequential_cfg.validate();
  chain_cfg.validate();
  require(plan.chains >= 1, "plan needs at least one chain");
  require(initial_cfg.epochs == plan.initial_epochs,
          "initial training epochs (" + std::to_string(initial_cfg.epochs) + ") differ from the plan's E0 (" +
              std::to_string(plan.initial_epochs) + ")");
  require(sequential_cfg.epochs == plan.sequential_epochs,
          "sequential training epochs (" + std::to_string(sequential_cfg.epochs) + ") differ from the plan's Es (" +
              std::to_string(plan.sequential_epochs) + ")");
  require(plan.used_epochs() <= plan.total_epochs, "plan exceeds its epoch budget");

  const auto chains = static_cast<std::size_t>(plan.chains);
  const auto m = static_cast<std::size_t>(plan.members_per_chain_after_first);
  std::vector<ChainOutput> outputs(chains);

  for_each_index(chains, exec, [&](std::size_t c) {
    const std::uint64_t cs = chain_seed(seed, c);
    AnchorChain chain(prior, seeded_chain(chain_cfg, cs));
    Rng init_rng = make_rng(cs, "init");
    ChainOutput& out = outputs[c];
    out.members.reserve(m + 1);
    out.provenance.reserve(m + 1);

    std::size_t k = 0;
    try {
      const TrainConfig first_cfg = seeded_train(initial_cfg, cs, 0);
      TrainResult res = train(arch, prior, chain.current().theta, initialize(arch, init_rng), data, first_cfg);
      OptimizerState state = std::move(res.state);
      out.members.push_back(res.params);
      out.provenance.push_back(
          make_provenance(static_cast<int>(c), 0, chain.current().theta, first_cfg, res, false, false));

      for (k = 1; k <= m; ++k) {
        const ParamVector& anchor = chain.advance().theta;
        const TrainConfig cfg = seeded_train(sequential_cfg, cs, k);
        const bool carry = sequential_cfg.carry_optimizer_state;
        TrainResult next = train(arch, prior, anchor, out.members.back(), data, cfg, carry ? &state : nullptr);
        state = std::move(next.state);
        out.members.push_back(next.params);
        out.provenance.push_back(make_provenance(static_cast<int>(c), static_cast<int>(k), anchor, cfg, next, true, carry));
      }
    } catch (const NumericError& e) {
      throw NumericError("chain " + std::to_string(c) + ", member " + std::to_string(k) + ": " + e.what());
    }
  });

  Ensemble ens{arch, prior, {}, {}};
  ens.members.reserve(static_cast<std::size_t>(plan.total_members));
  for (auto& o : outputs) {
    std::move(o.members.begin(), o.members.end(), std::back_inserter(ens.members));
    std::move(o.provenance.begin(), o.provenance.end(), std::back_inserter(ens.provenance));
  }
  return ens;
}

}  // namespace sae
