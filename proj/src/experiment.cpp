#include "sae/experiment.hpp"

#include <sstream>

#include "sae/error.hpp"

namespace sae {

Dataset build_dataset(const ExperimentConfig& cfg) {
  Dataset data;
  if (!cfg.dataset.csv_path.empty()) {
    LoadedCsv loaded = load_csv(cfg.dataset.csv_path, cfg.dataset.task_override.value_or(cfg.architecture.task));
    data = std::move(loaded.data);
  } else {
    SyntheticSpec spec = cfg.dataset.synthetic;
    spec.seed = cfg.data_seed();
    data = generate_synthetic(spec);
  }
  data.check_compatible(cfg.architecture);
  return data;
}

Matrix build_evaluation_inputs(const ExperimentConfig& cfg, const Dataset& data) {
  return evaluation_inputs(data, cfg.evaluation.points_per_axis, cfg.evaluation.margin);
}

PredictiveDensity build_reference(const ExperimentConfig& cfg, const Dataset& data, const Matrix& inputs,
                                  Execution exec) {
  const MlpArchitecture& arch = cfg.architecture;
  const GaussianPrior prior = cfg.make_prior();
  const bool linear_ok = arch.layer_count() == 1 && arch.output_dim() == 1 && arch.task == Task::regression;
  OracleKind kind = cfg.oracle.kind;
  if (kind == OracleKind::automatic) kind = linear_ok ? OracleKind::linear : OracleKind::grid;
  const std::uint64_t seed = derive_seed(cfg.seed, "reference");

  if (kind == OracleKind::linear) {
    require(linear_ok, "the linear oracle needs a single-layer [d, 1] regression network");
    const GaussianPosterior post = linear_posterior(design_matrix(arch, data.inputs), data.targets, arch.noise_sigma, prior);
    return reference_predictive(post, inputs, arch, cfg.oracle.samples, seed);
  }
  const GridPosterior grid = grid_posterior(arch, data, prior, cfg.oracle.grid, exec);
  return reference_predictive(grid, inputs, arch, cfg.oracle.samples, seed, exec);
}

Ensemble train_configured_ensemble(const ExperimentConfig& cfg, const Dataset& data, Execution exec) {
  const GaussianPrior prior = cfg.make_prior();
  const std::uint64_t seed = derive_seed(cfg.seed, "ensemble");
  TrainConfig initial = cfg.train;
  initial.epochs = static_cast<int>(cfg.initial_epochs);
  if (cfg.method == Method::ae) {
    const long long n = anchored_member_count(cfg.budget, cfg.initial_epochs);
    return train_anchored_ensemble(cfg.architecture, prior, data, static_cast<std::size_t>(n), initial, seed, exec);
  }
  const BudgetPlan plan = allocate_budget(cfg.budget, cfg.chains, cfg.initial_epochs, cfg.sequential_epochs);
  TrainConfig sequential = cfg.train;
  sequential.epochs = static_cast<int>(cfg.sequential_epochs);
  return train_sequential_anchored_ensemble(cfg.architecture, prior, data, plan, initial, sequential, cfg.chain, seed,
                                            exec);
}

namespace {

MetricsReport score(const ExperimentConfig& cfg, const Ensemble& ensemble, const PredictiveDensity& approx,
                    const PredictiveDensity& reference, Execution exec) {
  require(approx.task == reference.task, "reference and ensemble predictive describe different tasks");
  MetricsReport r;
  for (const auto& m : cfg.resolved_metrics()) {
    if (m == "agreement") r.agreement = agreement(reference.values, approx.values);
    if (m == "total_variation") r.total_variation = total_variation(reference.values, approx.values);
    if (m == "w2") r.w2 = regression_report(reference, approx, exec);
  }
  r.n_members = static_cast<long long>(ensemble.size());
  r.total_epochs = ensemble.total_epochs();
  r.seed = cfg.seed;
  r.method = to_string(cfg.method);
  r.budget = cfg.budget;
  r.config = config_to_json(cfg).dump();
  return r;
}

PredictiveDensity predict(const ExperimentConfig& cfg, const Ensemble& ensemble, const Matrix& inputs, Execution exec) {
  return ensemble_predictive(ensemble, inputs, cfg.evaluation.samples_per_member, derive_seed(cfg.seed, "predictive"),
                             exec);
}

}  // namespace

MetricsReport evaluate_ensemble(const ExperimentConfig& cfg, const Ensemble& ensemble, const Matrix& inputs,
                                const PredictiveDensity& reference, Execution exec) {
  return score(cfg, ensemble, predict(cfg, ensemble, inputs, exec), reference, exec);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const PredictiveDensity* reference, Execution exec) {
  cfg.validate();
  ExperimentResult res;
  res.data = build_dataset(cfg);
  res.eval_inputs = build_evaluation_inputs(cfg, res.data);
  res.reference = reference ? *reference : build_reference(cfg, res.data, res.eval_inputs, exec);
  require_length("reference predictive rows", static_cast<std::size_t>(res.eval_inputs.rows()), res.reference.rows());
  res.ensemble = train_configured_ensemble(cfg, res.data, exec);
  res.approx = predict(cfg, res.ensemble, res.eval_inputs, exec);
  res.report = score(cfg, res.ensemble, res.approx, res.reference, exec);
  res.trace = loss_trace(res.ensemble);
  return res;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const auto& dir = cfg.output_dir;
  write_text_file(dir / "report.txt", format_report(result.report));
  std::ostringstream trace;
  write_loss_trace(trace, result.trace);
  write_text_file(dir / "loss_trace.csv", trace.str());
  save_predictive(dir / "reference.csv", result.reference);
  save_predictive(dir / "predictive.csv", result.approx);
  write_text_file(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  save_ensemble(dir / "ensemble.bin", result.ensemble, config_to_json(cfg));
}

}  // namespace sae
