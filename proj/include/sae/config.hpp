#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sae/datasets.hpp"
#include "sae/ensembling.hpp"
#include "sae/oracle.hpp"

namespace sae {

inline constexpr int kConfigSchemaVersion = 1;

enum class Method { ae, sae };
std::string to_string(Method m);
Method parse_method(const std::string& s);

struct DatasetConfig {
  /// Synthetic generator, used when `csv_path` is empty.
  SyntheticSpec synthetic;
  /// Falls back to a substream of the master seed when absent.
  std::optional<std::uint64_t> seed;
  std::filesystem::path csv_path;
  std::optional<Task> task_override;
};

struct PriorConfig {
  double mean = 0.0;
  double std = 1.0;
  /// Optional per-layer (weight_std, bias_std) overrides.
  std::vector<std::pair<double, double>> layer_std;
};

enum class OracleKind { automatic, linear, grid };

struct OracleConfig {
  OracleKind kind = OracleKind::automatic;
  GridOptions grid;
  /// Posterior predictive samples per input (regression) or Monte Carlo
  /// draws (classification under a Gaussian posterior).
  std::size_t samples = 1000;
};

struct EvaluationConfig {
  int points_per_axis = 200;
  double margin = 0.2;
  std::size_t samples_per_member = 10;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  DatasetConfig dataset;
  MlpArchitecture architecture;
  PriorConfig prior;
  Method method = Method::sae;
  long long budget = 200;
  long long chains = 1;
  long long initial_epochs = 100;
  long long sequential_epochs = 2;
  /// Shared by initial and sequential trainings; epochs come from the plan.
  TrainConfig train;
  ChainConfig chain;
  OracleConfig oracle;
  EvaluationConfig evaluation;
  /// Empty = every metric applicable to the task.
  std::vector<std::string> metrics;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  /// Whole-config validation; throws ConfigError before any compute.
  void validate() const;

  GaussianPrior make_prior() const;
  std::uint64_t data_seed() const;
  std::vector<std::string> resolved_metrics() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sae
