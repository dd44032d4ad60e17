#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sae/ensembling.hpp"
#include "sae/metrics.hpp"

namespace sae {

// Ensemble file: a text header followed by a binary payload.
//
//   SAE-ENSEMBLE 1\n
//   <pretty-printed JSON header>\n
//   END-HEADER\n
//   <payload: IEEE-754 float64, little-endian>
//
// Payload order: prior mean (P), prior std (P), then per member its
// parameters (P), its anchor (P) and its final loss (1).
void write_ensemble(std::ostream& out, const Ensemble& ensemble, const nlohmann::json& config = nullptr);
Ensemble read_ensemble(std::istream& in);
void save_ensemble(const std::filesystem::path& path, const Ensemble& ensemble, const nlohmann::json& config = nullptr);
Ensemble load_ensemble(const std::filesystem::path& path);

// Predictive density CSV: header "p0,p1,..." (class probabilities) or
// "s0,s1,..." (regression samples), then one row per input.
void write_predictive(std::ostream& out, const PredictiveDensity& p);
PredictiveDensity read_predictive(std::istream& in);
void save_predictive(const std::filesystem::path& path, const PredictiveDensity& p);
PredictiveDensity load_predictive(const std::filesystem::path& path);

struct LossTraceEntry {
  long long cumulative_epoch = 0;
  int chain = 0;
  int member = 0;
  double loss = 0.0;
};

/// One entry per trained epoch, in ensemble order; cumulative_epoch counts
/// epochs over the whole run starting at 1.
std::vector<LossTraceEntry> loss_trace(const Ensemble& ensemble);
void write_loss_trace(std::ostream& out, const std::vector<LossTraceEntry>& trace);

/// "step,theta0,theta1,..." then one row per anchor.
void write_chain_trace(std::ostream& out, const std::vector<ParamVector>& anchors);

struct MetricsReport {
  std::optional<double> agreement;
  std::optional<double> total_variation;
  std::optional<double> w2;
  long long n_members = 0;
  long long total_epochs = 0;
  std::uint64_t seed = 0;
  std::string method;
  long long budget = 0;
  /// Resolved config as compact JSON; empty when unknown.
  std::string config;
};

/// key=value lines, reals in fixed notation with 6 decimals.
std::string format_report(const MetricsReport& r);
MetricsReport parse_report(const std::string& text);
MetricsReport load_report(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sae
