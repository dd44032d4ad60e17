// Command-line front end: train-ae, train-sae, oracle, evaluate, compare,
// chain-trace.
//
// Failures print one line "error <CODE>: <message>" on stderr and exit with
// 2 (config), 3 (numeric) or 4 (I/O).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "sae/compare.hpp"
#include "sae/error.hpp"
#include "sae/experiment.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "master seed, overrides the config");
  cmd->add_option("--out", f.out, "output directory, overrides the config");
}

sae::ExperimentConfig resolve(const CommonFlags& f, std::optional<std::string> method = std::nullopt) {
  std::ifstream in(f.config);
  if (!in) throw sae::IoError("cannot open config '" + f.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw sae::ConfigError("config '" + f.config + "' is not valid JSON: " + e.what());
  }
  if (method) j["method"] = *method;
  sae::ExperimentConfig cfg = sae::config_from_json(j);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  return cfg;
}

int train(const CommonFlags& f, const std::string& method) {
  const sae::ExperimentConfig cfg = resolve(f, method);
  const sae::ExperimentResult res = sae::run_experiment(cfg);
  sae::write_experiment(cfg, res);
  std::cout << sae::format_report(res.report);
  return 0;
}

int oracle(const CommonFlags& f) {
  const sae::ExperimentConfig cfg = resolve(f);
  const sae::Dataset data = sae::build_dataset(cfg);
  const sae::Matrix inputs = sae::build_evaluation_inputs(cfg, data);
  const sae::PredictiveDensity ref = sae::build_reference(cfg, data, inputs);
  sae::save_predictive(cfg.output_dir / "reference.csv", ref);
  sae::write_text_file(cfg.output_dir / "config.json", sae::config_to_json(cfg).dump(2) + "\n");
  std::cout << "reference predictive: " << ref.rows() << " inputs -> " << (cfg.output_dir / "reference.csv").string()
            << "\n";
  return 0;
}

int evaluate(const CommonFlags& f, const std::string& ensemble_path, const std::string& reference_path) {
  const sae::ExperimentConfig cfg = resolve(f);
  const sae::Ensemble ens = sae::load_ensemble(ensemble_path);
  const sae::PredictiveDensity ref = sae::load_predictive(reference_path);
  const sae::Dataset data = sae::build_dataset(cfg);
  const sae::Matrix inputs = sae::build_evaluation_inputs(cfg, data);
  sae::require_length("reference rows", static_cast<std::size_t>(inputs.rows()), ref.rows());
  sae::MetricsReport r = sae::evaluate_ensemble(cfg, ens, inputs, ref);
  const std::string text = sae::format_report(r);
  sae::write_text_file(cfg.output_dir / "report.txt", text);
  std::cout << text;
  return 0;
}

int compare(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<sae::MetricsReport> reports;
  for (const auto& p : paths) reports.push_back(sae::load_report(p));
  const auto cells = sae::compare_runs(reports);
  const std::string text = sae::format_comparison_text(cells);
  if (!out.empty()) {
    sae::write_text_file(std::filesystem::path(out) / "comparison.txt", text);
    sae::write_text_file(std::filesystem::path(out) / "comparison.csv", sae::format_comparison_csv(cells));
  }
  std::cout << text;
  return 0;
}

int chain_trace(const CommonFlags& f, std::size_t steps) {
  const sae::ExperimentConfig cfg = resolve(f);
  const sae::GaussianPrior prior = cfg.make_prior();
  sae::ChainConfig chain = cfg.chain;
  chain.seed = sae::derive_seed(cfg.seed, "chain-trace");
  std::ostringstream ss;
  sae::write_chain_trace(ss, sae::run_chain(prior, steps, chain));
  sae::write_text_file(cfg.output_dir / "chain_trace.csv", ss.str());
  std::cout << steps << " anchors -> " << (cfg.output_dir / "chain_trace.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential and standard anchored ensembles with exact desk-scale oracles"};
  app.require_subcommand(1);

  CommonFlags ae_flags, sae_flags, oracle_flags, eval_flags, trace_flags;
  auto* ae_cmd = app.add_subcommand("train-ae", "train an anchored ensemble and evaluate it against the oracle");
  add_common(ae_cmd, ae_flags);
  auto* sae_cmd = app.add_subcommand("train-sae", "train a sequential anchored ensemble and evaluate it");
  add_common(sae_cmd, sae_flags);
  auto* oracle_cmd = app.add_subcommand("oracle", "write the exact reference predictive");
  add_common(oracle_cmd, oracle_flags);

  auto* eval_cmd = app.add_subcommand("evaluate", "score a saved ensemble against a saved reference");
  add_common(eval_cmd, eval_flags);
  std::string ensemble_path, reference_path;
  eval_cmd->add_option("--ensemble", ensemble_path, "ensemble file")->required();
  eval_cmd->add_option("--reference", reference_path, "reference predictive CSV")->required();

  auto* compare_cmd = app.add_subcommand("compare", "median/min/max table over metric reports");
  std::vector<std::string> report_paths;
  std::string compare_out;
  compare_cmd->add_option("reports", report_paths, "report files")->required();
  compare_cmd->add_option("--out", compare_out, "directory for comparison.txt / comparison.csv");

  auto* trace_cmd = app.add_subcommand("chain-trace", "export a guided-walk anchor chain");
  add_common(trace_cmd, trace_flags);
  std::size_t steps = 1000;
  trace_cmd->add_option("--steps", steps, "number of anchors")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error E_CONFIG: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*ae_cmd) return train(ae_flags, "ae");
    if (*sae_cmd) return train(sae_flags, "sae");
    if (*oracle_cmd) return oracle(oracle_flags);
    if (*eval_cmd) return evaluate(eval_flags, ensemble_path, reference_path);
    if (*compare_cmd) return compare(report_paths, compare_out);
    if (*trace_cmd) return chain_trace(trace_flags, steps);
  } catch (const sae::Error& e) {
    std::cerr << "error " << e.code() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error E_IO: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
