#pragma once

#include <string>
#include <vector>

#include "sae/io.hpp"

namespace sae {

/// Median, with the mean of the two middle values for even counts.
double median(std::vector<double> values);

/// One (method, budget, metric) cell: median with offsets to the extremes.
struct CellSummary {
  std::string method;
  long long budget = 0;
  std::string metric;
  double median = 0.0;
  double plus = 0.0;   // max - median
  double minus = 0.0;  // median - min
  std::size_t runs = 0;
};

/// Groups reports by (method, budget). All reports must carry the same
/// metric set.
std::vector<CellSummary> compare_runs(const std::vector<MetricsReport>& reports);

/// Plain-text table, cells written as median^{+plus}_{-minus}.
std::string format_comparison_text(const std::vector<CellSummary>& cells);

/// method,budget,metric,median,plus,minus,runs
std::string format_comparison_csv(const std::vector<CellSummary>& cells);

}  // namespace sae
