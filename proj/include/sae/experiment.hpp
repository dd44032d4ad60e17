#pragma once

#include <string>
#include <vector>

#include "sae/config.hpp"
#include "sae/io.hpp"

namespace sae {

Dataset build_dataset(const ExperimentConfig& cfg);
Matrix build_evaluation_inputs(const ExperimentConfig& cfg, const Dataset& data);

/// Exact reference predictive on `inputs`: the linear-Gaussian posterior for
/// single-layer regression networks, otherwise the grid posterior.
PredictiveDensity build_reference(const ExperimentConfig& cfg, const Dataset& data, const Matrix& inputs,
                                  Execution exec = Execution::parallel);

/// AE (floor(B / E0) members of E0 epochs) or SAE (allocate_budget).
Ensemble train_configured_ensemble(const ExperimentConfig& cfg, const Dataset& data,
                                   Execution exec = Execution::parallel);

MetricsReport evaluate_ensemble(const ExperimentConfig& cfg, const Ensemble& ensemble, const Matrix& inputs,
                                const PredictiveDensity& reference, Execution exec = Execution::parallel);

struct ExperimentResult {
  Dataset data;
  Matrix eval_inputs;
  PredictiveDensity reference;
  Ensemble ensemble;
  PredictiveDensity approx;
  MetricsReport report;
  std::vector<LossTraceEntry> trace;
};

/// Dataset, oracle reference, ensemble training and evaluation, without
/// touching the filesystem. A precomputed reference may be supplied to skip
/// the oracle.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const PredictiveDensity* reference = nullptr,
                                Execution exec = Execution::parallel);

/// Writes report.txt, loss_trace.csv, ensemble.bin, reference.csv,
/// predictive.csv and config.json into cfg.output_dir.
void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace sae
