#include "sae/datasets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sae/error.hpp"

namespace sae {

Dataset generate_synthetic(const SyntheticSpec& spec) {
  require(spec.n >= 1, "synthetic dataset needs n >= 1");
  require(spec.noise >= 0.0, "synthetic noise must be non-negative");
  Rng rng = make_rng(spec.seed, "synthetic");
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  const auto n = static_cast<Eigen::Index>(spec.n);

  Dataset d;
  d.name = spec.name;
  d.targets.resize(n);
  if (spec.name == "line1d" || spec.name == "sine1d") {
    d.inputs.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = ux(rng);
      const double f = spec.name == "line1d" ? spec.slope * x + spec.intercept : std::sin(2.0 * std::numbers::pi * x);
      d.inputs(i, 0) = x;
      d.targets(i) = f + spec.noise * standard_normal(rng);
    }
  } else if (spec.name == "twoclass2d") {
    d.inputs.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int label = static_cast<int>(i % 2);
      const double cx = (label == 0 ? -0.5 : 0.5) * spec.separation;
      d.inputs(i, 0) = cx + spec.noise * standard_normal(rng);
      d.inputs(i, 1) = spec.noise * standard_normal(rng);
      d.targets(i) = label;
    }
  } else {
    throw ConfigError("unknown synthetic dataset '" + spec.name + "' (valid: line1d, sine1d, twoclass2d)");
  }
  return d;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

LoadedCsv load_csv(const std::filesystem::path& path, std::optional<Task> task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ConfigError("'" + path.string() + "' is empty");
  const std::size_t cols = split_csv(trim(line)).size();
  require(cols >= 2, "'" + path.string() + "' needs at least one input column and a target column");

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_csv(trim(line));
    if (cells.size() != cols) {
      throw ConfigError(path.string() + ": row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(cols));
    }
    std::vector<double> values(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = trim(cells[c]);
      std::size_t used = 0;
      try {
        values[c] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size() || !std::isfinite(values[c])) {
        throw ConfigError(path.string() + ": malformed cell '" + cell + "' at (" + std::to_string(row_no) + "," +
                          std::to_string(c + 1) + ")");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ConfigError("'" + path.string() + "' has no data rows");

  LoadedCsv out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(cols - 1);
  out.data.name = path.stem().string();
  out.data.inputs.resize(n, d);
  out.data.targets.resize(n);
  std::set<double> distinct;
  bool integral = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) out.data.inputs(i, j) = r[static_cast<std::size_t>(j)];
    const double t = r.back();
    out.data.targets(i) = t;
    integral = integral && t == std::floor(t) && t >= 0.0 && t < 64.0;
    distinct.insert(t);
  }
  out.task = task.value_or(integral && distinct.size() <= 64 ? Task::classification : Task::regression);
  if (out.task == Task::classification) {
    require(integral, path.string() + ": classification targets must be integers in [0, 64)");
    out.num_classes = static_cast<int>(*distinct.rbegin()) + 1;
  }
  return out;
}

Matrix evaluation_inputs(const Dataset& data, int points_per_axis, double margin) {
  require(data.size() >= 1, "evaluation inputs need a non-empty dataset");
  require(points_per_axis >= 2, "evaluation grid needs at least 2 points per axis");
  require(data.dim() == 1 || data.dim() == 2, "evaluation grid supports 1-D or 2-D inputs");
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(data.dim()));
  for (int j = 0; j < data.dim(); ++j) {
    const double lo = data.inputs.col(j).minCoeff();
    const double hi = data.inputs.col(j).maxCoeff();
    const double pad = margin * std::max(hi - lo, 1e-12);
    auto& ax = axes[static_cast<std::size_t>(j)];
    for (int k = 0; k < points_per_axis; ++k) ax.push_back((lo - pad) + (hi - lo + 2 * pad) * k / (points_per_axis - 1));
  }
  if (data.dim() == 1) return Eigen::Map<const Vector>(axes[0].data(), points_per_axis);
  Matrix out(static_cast<Eigen::Index>(points_per_axis) * points_per_axis, 2);
  Eigen::Index r = 0;
  for (double x0 : axes[0]) {
    for (double x1 : axes[1]) {
      out(r, 0) = x0;
      out(r, 1) = x1;
      ++r;
    }
  }
  return out;
}

}  // namespace sae
