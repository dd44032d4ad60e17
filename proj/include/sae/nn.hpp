#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "sae/random.hpp"

namespace sae {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Flat vector of every network parameter. Packing is layer-ordered:
/// weights of layer 1 (shape out x in, row-major), biases of layer 1,
/// weights of layer 2, ...
using ParamVector = Eigen::VectorXd;

enum class Activation { relu, tanh };
enum class Task { classification, regression };

std::string to_string(Activation a);
std::string to_string(Task t);
Activation parse_activation(const std::string& s);
Task parse_task(const std::string& s);

struct MlpArchitecture {
  std::vector<int> layer_sizes;  // input dim first, output dim last
  Activation activation = Activation::tanh;
  Task task = Task::regression;
  double noise_sigma = 1.0;  // regression observation noise (std)
  bool bias = true;

  /// Throws ConfigError unless there are >= 2 layers of size >= 1 and
  /// noise_sigma > 0.
  void validate() const;

  std::size_t parameter_count() const;
  std::size_t layer_count() const { return layer_sizes.size() - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }

  /// Offset of layer l's weight block inside a ParamVector.
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;

  bool operator==(const MlpArchitecture&) const = default;
};

/// n x d inputs; targets are class indices (stored as reals) or regression
/// values. n == 0 is permitted for objective evaluation only.
struct Dataset {
  Matrix inputs;
  Vector targets;
  std::string name;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  int dim() const { return static_cast<int>(inputs.cols()); }
  int label(std::size_t i) const { return static_cast<int>(targets(static_cast<Eigen::Index>(i))); }

  Dataset subset(const std::vector<std::size_t>& rows) const;

  /// Throws ConfigError if the dataset cannot be used with `arch`.
  void check_compatible(const MlpArchitecture& arch) const;
};

struct Layer {
  RowMatrix weights;  // out x in
  Vector bias;        // out, or empty when the architecture has no bias
};

std::vector<Layer> unflatten(const MlpArchitecture& arch, const ParamVector& params);
ParamVector flatten(const MlpArchitecture& arch, const std::vector<Layer>& layers);

/// Logits (classification) or predictive mean (regression) for one input.
Vector forward(const MlpArchitecture& arch, const ParamVector& params, const Vector& x);

/// Row i holds forward(inputs.row(i)).
Matrix forward_batch(const MlpArchitecture& arch, const ParamVector& params, const Matrix& inputs);

double log_likelihood(const MlpArchitecture& arch, const ParamVector& params, const Dataset& data);

/// Exact reverse-mode gradient of log_likelihood.
ParamVector grad_log_likelihood(const MlpArchitecture& arch, const ParamVector& params,
                                const Dataset& data);

struct ValueAndGradient {
  double value = 0.0;
  ParamVector gradient;
};

/// log_likelihood and its gradient from a single forward/backward pass.
ValueAndGradient log_likelihood_and_grad(const MlpArchitecture& arch, const ParamVector& params,
                                         const Dataset& data);

/// Softmax of the logits. Classification only.
Vector predict_proba(const MlpArchitecture& arch, const ParamVector& params, const Vector& x);
Matrix predict_proba_batch(const MlpArchitecture& arch, const ParamVector& params,
                           const Matrix& inputs);

/// Numerically stable softmax of one logit vector.
Vector softmax(const Vector& logits);

/// Fresh initialization: weights ~ N(0, 1/fan_in), biases 0.
ParamVector initialize(const MlpArchitecture& arch, Rng& rng);

}  // namespace sae
