#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sae/nn.hpp"

namespace sae {

struct SyntheticSpec {
  /// line1d, sine1d or twoclass2d.
  std::string name = "line1d";
  std::size_t n = 50;
  /// Observation noise std (line1d, sine1d) or blob std (twoclass2d).
  double noise = 0.1;
  std::uint64_t seed = 0;
  double slope = 1.0;      // line1d
  double intercept = 0.0;  // line1d
  /// Distance between the two blob centres (twoclass2d).
  double separation = 4.0;
};

/// line1d: y = slope x + intercept + e; sine1d: y = sin(2 pi x) + e, both
/// with x ~ U(-1, 1). twoclass2d: alternating labels 0/1 drawn around
/// (-separation/2, 0) and (+separation/2, 0).
Dataset generate_synthetic(const SyntheticSpec& spec);

struct LoadedCsv {
  Dataset data;
  Task task = Task::regression;
  int num_classes = 0;  // classification only
};

/// Header row required; last column is the target. Targets that are all
/// integers in [0, 64) are read as class labels unless `task` overrides.
LoadedCsv load_csv(const std::filesystem::path& path, std::optional<Task> task = std::nullopt);

/// Deterministic evaluation inputs spanning the data range widened by
/// `margin` on each side: `points_per_axis` equispaced points in 1-D, a
/// points_per_axis^2 grid in 2-D.
Matrix evaluation_inputs(const Dataset& data, int points_per_axis, double margin = 0.2);

}  // namespace sae
