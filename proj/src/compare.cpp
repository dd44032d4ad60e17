#include "sae/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "sae/error.hpp"

namespace sae {

namespace {

std::vector<std::pair<std::string, std::optional<double>>> metric_values(const MetricsReport& r) {
  return {{"agreement", r.agreement}, {"total_variation", r.total_variation}, {"w2", r.w2}};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CellSummary> compare_runs(const std::vector<MetricsReport>& reports) {
  require(!reports.empty(), "compare needs at least one report");
  std::vector<std::string> metric_set;
  for (const auto& [name, v] : metric_values(reports.front())) {
    if (v) metric_set.push_back(name);
  }
  std::map<std::pair<std::string, long long>, std::map<std::string, std::vector<double>>> cells;
  for (const auto& r : reports) {
    std::vector<std::string> here;
    for (const auto& [name, v] : metric_values(r)) {
      if (v) {
        here.push_back(name);
        cells[{r.method, r.budget}][name].push_back(*v);
      }
    }
    if (here != metric_set) throw ConfigError("reports carry different metric sets; cannot compare");
  }

  std::vector<CellSummary> out;
  for (const auto& [key, metrics] : cells) {
    for (const auto& name : metric_set) {
      const auto& v = metrics.at(name);
      CellSummary c;
      c.method = key.first;
      c.budget = key.second;
      c.metric = name;
      c.median = median(v);
      c.plus = *std::max_element(v.begin(), v.end()) - c.median;
      c.minus = c.median - *std::min_element(v.begin(), v.end());
      c.runs = v.size();
      out.push_back(c);
    }
  }
  return out;
}

std::string format_comparison_text(const std::vector<CellSummary>& cells) {
  std::ostringstream out;
  out << "metric           method  budget  runs  median^{+max}_{-min}\n";
  for (const auto& c : cells) {
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-7s %7lld %5zu  %s^{+%s}_{-%s}\n", c.metric.c_str(), c.method.c_str(), c.budget,
                  c.runs, fmt(c.median).c_str(), fmt(c.plus).c_str(), fmt(c.minus).c_str());
    out << line;
  }
  return out.str();
}

std::string format_comparison_csv(const std::vector<CellSummary>& cells) {
  std::ostringstream out;
  out << "method,budget,metric,median,plus,minus,runs\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.budget << ',' << c.metric << ',' << fmt(c.median) << ',' << fmt(c.plus) << ','
        << fmt(c.minus) << ',' << c.runs << '\n';
  }
  return out.str();
}

}  // namespace sae
