#include "sae/config.hpp"

#include <fstream>
#include <set>

#include "sae/error.hpp"

namespace sae {

using nlohmann::json;

std::string to_string(Method m) { return m == Method::ae ? "ae" : "sae"; }

Method parse_method(const std::string& s) {
  if (s == "ae") return Method::ae;
  if (s == "sae") return Method::sae;
  throw ConfigError("unknown method '" + s + "' (expected ae or sae)");
}

namespace {

const std::set<std::string> kKnownMetrics = {"agreement", "total_variation", "w2"};

OracleKind parse_oracle_kind(const std::string& s) {
  if (s == "auto") return OracleKind::automatic;
  if (s == "linear") return OracleKind::linear;
  if (s == "grid") return OracleKind::grid;
  throw ConfigError("unknown oracle kind '" + s + "' (expected auto, linear or grid)");
}

std::string oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::automatic: return "auto";
    case OracleKind::linear: return "linear";
    case OracleKind::grid: return "grid";
  }
  return "auto";
}

void reject_unknown_keys(const json& j, std::string_view where, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(schema_version == kConfigSchemaVersion,
          "unsupported config schema_version " + std::to_string(schema_version) + " (expected " +
              std::to_string(kConfigSchemaVersion) + ")");
  architecture.validate();
  require(prior.std > 0.0, "prior std must be positive");
  require(prior.layer_std.empty() || prior.layer_std.size() == architecture.layer_count(),
          "prior.layers must list one entry per network layer");
  for (const auto& [w, b] : prior.layer_std) require(w > 0.0 && b > 0.0, "per-layer prior std must be positive");
  require(budget >= 1 && initial_epochs >= 1, "budget and initial_epochs must be positive");
  TrainConfig t = train;
  t.epochs = 1;
  t.validate();
  if (method == Method::sae) {
    require(chains >= 1 && sequential_epochs >= 1, "sae needs chains >= 1 and sequential_epochs >= 1");
    chain.validate();
    require(budget >= chains * initial_epochs, "budget cannot fit one initial training per chain");
  } else {
    require(budget >= initial_epochs, "budget cannot fit a single ae member");
  }
  require(evaluation.points_per_axis >= 2, "evaluation.points_per_axis must be >= 2");
  require(evaluation.samples_per_member >= 1, "evaluation.samples_per_member must be >= 1");
  const bool classification = architecture.task == Task::classification;
  require(oracle.samples >= 1, "oracle.samples must be >= 1");
  const bool linear_ok = architecture.layer_count() == 1 && architecture.output_dim() == 1 && !classification;
  if (oracle.kind == OracleKind::linear) {
    require(linear_ok, "the linear oracle needs a single-layer [d, 1] regression network");
  } else if (oracle.kind == OracleKind::grid || !linear_ok) {
    // auto stays open for larger networks evaluated against a supplied reference
    require(oracle.kind != OracleKind::grid || architecture.parameter_count() <= kMaxGridParameters,
            "the grid oracle supports at most " + std::to_string(kMaxGridParameters) + " parameters, the network has " +
                std::to_string(architecture.parameter_count()));
    require(oracle.grid.points_per_axis >= 3, "oracle.points_per_axis must be >= 3");
    require(oracle.grid.extent >= 4.0, "oracle.extent must be >= 4 prior standard deviations");
  }
  for (const auto& m : metrics) require(kKnownMetrics.contains(m), "unknown metric '" + m + "'");
  for (const auto& m : resolved_metrics()) {
    require(classification != (m == "w2"), "metric '" + m + "' does not apply to a " + to_string(architecture.task) + " task");
  }
  if (dataset.csv_path.empty()) {
    require(dataset.synthetic.n >= 1, "dataset.n must be >= 1");
    if (dataset.synthetic.name == "twoclass2d") {
      require(classification && architecture.input_dim() == 2, "twoclass2d needs a 2-input classification network");
    } else if (dataset.synthetic.name == "line1d" || dataset.synthetic.name == "sine1d") {
      require(!classification && architecture.input_dim() == 1, dataset.synthetic.name + " needs a 1-input regression network");
    } else {
      throw ConfigError("unknown synthetic dataset '" + dataset.synthetic.name + "' (valid: line1d, sine1d, twoclass2d)");
    }
  }
}

GaussianPrior ExperimentConfig::make_prior() const {
  GaussianPrior p = GaussianPrior::isotropic(architecture.parameter_count(), prior.mean, prior.std);
  for (std::size_t l = 0; l < prior.layer_std.size(); ++l) {
    const auto w0 = static_cast<Eigen::Index>(architecture.weight_offset(l));
    const auto nw = static_cast<Eigen::Index>(architecture.layer_sizes[l]) * architecture.layer_sizes[l + 1];
    p.std.segment(w0, nw).setConstant(prior.layer_std[l].first);
    if (architecture.bias) {
      p.std.segment(static_cast<Eigen::Index>(architecture.bias_offset(l)), architecture.layer_sizes[l + 1])
          .setConstant(prior.layer_std[l].second);
    }
  }
  return p;
}

std::uint64_t ExperimentConfig::data_seed() const {
  return dataset.seed.value_or(derive_seed(seed, "data"));
}

std::vector<std::string> ExperimentConfig::resolved_metrics() const {
  if (!metrics.empty()) return metrics;
  if (architecture.task == Task::classification) return {"agreement", "total_variation"};
  return {"w2"};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j, "config",
                      {"schema_version", "seed", "output_dir", "dataset", "architecture", "prior", "method", "budget",
                       "chains", "initial_epochs", "sequential_epochs", "train", "chain", "oracle", "evaluation",
                       "metrics"});
  ExperimentConfig c;
  require(j.contains("schema_version"), "config is missing schema_version");
  c.schema_version = get<int>(j, "schema_version", 0);
  c.seed = get<std::uint64_t>(j, "seed", 0);
  c.output_dir = get<std::string>(j, "output_dir", "out");
  c.method = parse_method(get<std::string>(j, "method", "sae"));
  c.budget = get<long long>(j, "budget", c.budget);
  c.initial_epochs = get<long long>(j, "initial_epochs", c.initial_epochs);
  if (c.method == Method::sae) {
    for (const char* key : {"chains", "sequential_epochs"}) {
      require(j.contains(key), std::string("method sae requires '") + key + "'");
    }
  }
  c.chains = get<long long>(j, "chains", c.chains);
  c.sequential_epochs = get<long long>(j, "sequential_epochs", c.sequential_epochs);

  require(j.contains("dataset"), "config is missing dataset");
  const json& d = j.at("dataset");
  reject_unknown_keys(d, "dataset", {"generator", "n", "noise", "seed", "slope", "intercept", "separation", "csv", "task"});
  if (d.contains("csv")) {
    c.dataset.csv_path = get<std::string>(d, "csv", "");
    if (d.contains("task")) c.dataset.task_override = parse_task(get<std::string>(d, "task", ""));
  } else {
    auto& s = c.dataset.synthetic;
    require(d.contains("generator"), "dataset needs 'generator' or 'csv'");
    s.name = get<std::string>(d, "generator", s.name);
    s.n = get<std::size_t>(d, "n", s.n);
    s.noise = get<double>(d, "noise", s.noise);
    s.slope = get<double>(d, "slope", s.slope);
    s.intercept = get<double>(d, "intercept", s.intercept);
    s.separation = get<double>(d, "separation", s.separation);
  }
  if (d.contains("seed")) c.dataset.seed = get<std::uint64_t>(d, "seed", 0);

  require(j.contains("architecture"), "config is missing architecture");
  const json& a = j.at("architecture");
  reject_unknown_keys(a, "architecture", {"layer_sizes", "activation", "task", "noise_sigma", "bias"});
  c.architecture.layer_sizes = get<std::vector<int>>(a, "layer_sizes", {});
  c.architecture.activation = parse_activation(get<std::string>(a, "activation", "tanh"));
  c.architecture.task = parse_task(get<std::string>(a, "task", "regression"));
  c.architecture.noise_sigma = get<double>(a, "noise_sigma", 1.0);
  c.architecture.bias = get<bool>(a, "bias", true);

  if (j.contains("prior")) {
    const json& p = j.at("prior");
    reject_unknown_keys(p, "prior", {"mean", "std", "layers"});
    c.prior.mean = get<double>(p, "mean", 0.0);
    c.prior.std = get<double>(p, "std", 1.0);
    if (p.contains("layers")) {
      for (const json& l : p.at("layers")) {
        const double base = c.prior.std;
        c.prior.layer_std.emplace_back(get<double>(l, "weight_std", base), get<double>(l, "bias_std", base));
      }
    }
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown_keys(t, "train", {"batch_size", "learning_rate", "optimizer", "adam_betas", "adam_epsilon",
                                     "carry_optimizer_state"});
    c.train.batch_size = get<std::size_t>(t, "batch_size", 0);
    c.train.learning_rate = get<double>(t, "learning_rate", c.train.learning_rate);
    c.train.optimizer = parse_optimizer(get<std::string>(t, "optimizer", "adam"));
    if (t.contains("adam_betas")) {
      const auto betas = get<std::vector<double>>(t, "adam_betas", {});
      require(betas.size() == 2, "train.adam_betas must have two entries");
      c.train.beta1 = betas[0];
      c.train.beta2 = betas[1];
    }
    c.train.adam_epsilon = get<double>(t, "adam_epsilon", c.train.adam_epsilon);
    c.train.carry_optimizer_state = get<bool>(t, "carry_optimizer_state", false);
  }

  if (j.contains("chain")) {
    const json& ch = j.at("chain");
    reject_unknown_keys(ch, "chain", {"step_sigma", "relative_to_prior_std"});
    c.chain.step_sigma = get<double>(ch, "step_sigma", c.chain.step_sigma);
    c.chain.relative_to_prior_std = get<bool>(ch, "relative_to_prior_std", true);
  }

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    reject_unknown_keys(o, "oracle", {"kind", "points_per_axis", "extent", "samples"});
    c.oracle.kind = parse_oracle_kind(get<std::string>(o, "kind", "auto"));
    c.oracle.grid.points_per_axis = get<int>(o, "points_per_axis", c.oracle.grid.points_per_axis);
    c.oracle.grid.extent = get<double>(o, "extent", c.oracle.grid.extent);
    c.oracle.samples = get<std::size_t>(o, "samples", c.oracle.samples);
  }

  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    reject_unknown_keys(e, "evaluation", {"points_per_axis", "margin", "samples_per_member"});
    c.evaluation.points_per_axis = get<int>(e, "points_per_axis", c.evaluation.points_per_axis);
    c.evaluation.margin = get<double>(e, "margin", c.evaluation.margin);
    c.evaluation.samples_per_member = get<std::size_t>(e, "samples_per_member", c.evaluation.samples_per_member);
  }

  c.metrics = get<std::vector<std::string>>(j, "metrics", {});
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  json d;
  if (!c.dataset.csv_path.empty()) {
    d["csv"] = c.dataset.csv_path.string();
    if (c.dataset.task_override) d["task"] = to_string(*c.dataset.task_override);
  } else {
    const auto& s = c.dataset.synthetic;
    d = {{"generator", s.name}, {"n", s.n}, {"noise", s.noise}, {"slope", s.slope}, {"intercept", s.intercept},
         {"separation", s.separation}};
  }
  d["seed"] = c.data_seed();
  j["dataset"] = d;
  const auto& a = c.architecture;
  j["architecture"] = {{"layer_sizes", a.layer_sizes}, {"activation", to_string(a.activation)},
                       {"task", to_string(a.task)}, {"noise_sigma", a.noise_sigma}, {"bias", a.bias}};
  json prior = {{"mean", c.prior.mean}, {"std", c.prior.std}};
  if (!c.prior.layer_std.empty()) {
    json layers = json::array();
    for (const auto& [w, b] : c.prior.layer_std) layers.push_back({{"weight_std", w}, {"bias_std", b}});
    prior["layers"] = layers;
  }
  j["prior"] = prior;
  j["method"] = to_string(c.method);
  j["budget"] = c.budget;
  j["chains"] = c.chains;
  j["initial_epochs"] = c.initial_epochs;
  j["sequential_epochs"] = c.sequential_epochs;
  j["train"] = {{"batch_size", c.train.batch_size},
                {"learning_rate", c.train.learning_rate},
                {"optimizer", to_string(c.train.optimizer)},
                {"adam_betas", {c.train.beta1, c.train.beta2}},
                {"adam_epsilon", c.train.adam_epsilon},
                {"carry_optimizer_state", c.train.carry_optimizer_state}};
  j["chain"] = {{"step_sigma", c.chain.step_sigma}, {"relative_to_prior_std", c.chain.relative_to_prior_std}};
  j["oracle"] = {{"kind", oracle_kind_name(c.oracle.kind)},
                 {"points_per_axis", c.oracle.grid.points_per_axis},
                 {"extent", c.oracle.grid.extent},
                 {"samples", c.oracle.samples}};
  j["evaluation"] = {{"points_per_axis", c.evaluation.points_per_axis},
                     {"margin", c.evaluation.margin},
                     {"samples_per_member", c.evaluation.samples_per_member}};
  j["metrics"] = c.resolved_metrics();
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace sae
