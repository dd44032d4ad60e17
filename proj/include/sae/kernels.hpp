#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference and an
// OpenMP path; the parallel path partitions work into fixed-size blocks that
// do not depend on the thread count, so its results are reproducible run to
// run. Serial and parallel agree to rounding (summation order differs).

#include <span>
#include <vector>

#include "sae/execution.hpp"
#include "sae/objectives.hpp"

namespace sae::kernels {

/// Work items per parallel block.
inline constexpr std::size_t kBlockSize = 1024;

/// Sum of `values`. Parallel path: fixed blocks summed in order.
double sum(std::span<const double> values, Execution exec);

/// Flat index -> grid coordinates, last axis fastest.
ParamVector grid_point(const std::vector<std::vector<double>>& axes, std::size_t flat);

std::size_t grid_size(const std::vector<std::vector<double>>& axes);

/// log p(D | theta) + log p(theta) at every point of the tensor grid.
std::vector<double> grid_log_joint(const MlpArchitecture& arch, const Dataset& data, const GaussianPrior& prior,
                                   const std::vector<std::vector<double>>& axes, Execution exec);

/// sum_k weights[k] * predict_proba(points[k], inputs). Points with zero
/// weight are skipped.
Matrix mixture_proba(const MlpArchitecture& arch, const std::vector<ParamVector>& points,
                     std::span<const double> weights, const Matrix& inputs, Execution exec);

/// Row-wise 1-D Wasserstein-2 between matching rows of a and b.
std::vector<double> rowwise_wasserstein2(const Matrix& a, const Matrix& b, Execution exec);

}  // namespace sae::kernels
