#include "sae/nn.hpp"

#include <cmath>

#include "sae/error.hpp"

namespace sae {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)

void check_params(const MlpArchitecture& arch, const ParamVector& params) {
  require_length("parameter vector", arch.parameter_count(), static_cast<std::size_t>(params.size()));
}

Eigen::Map<const RowMatrix> weight_view(const MlpArchitecture& arch, const ParamVector& params,
                                        std::size_t l) {
  return {params.data() + arch.weight_offset(l), arch.layer_sizes[l + 1], arch.layer_sizes[l]};
}

void activate(Activation a, Matrix& z) {
  switch (a) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::tanh: z = z.array().tanh().matrix(); break;
  }
}

// Derivative expressed through the activation output h = act(z).
Matrix activation_derivative(Activation a, const Matrix& h) {
  switch (a) {
    case Activation::relu: return (h.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - h.array().square()).matrix();
  }
  return {};
}

// Forward pass keeping every layer's post-activation output (index 0 is the input).
std::vector<Matrix> forward_trace(const MlpArchitecture& arch, const ParamVector& params,
                                  const Matrix& inputs) {
  std::vector<Matrix> acts;
  acts.reserve(arch.layer_sizes.size());
  acts.push_back(inputs);
  const std::size_t L = arch.layer_count();
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = acts.back() * weight_view(arch, params, l).transpose();
    if (arch.bias) {
      Eigen::Map<const Vector> b(params.data() + arch.bias_offset(l), arch.layer_sizes[l + 1]);
      z.rowwise() += b.transpose();
    }
    if (l + 1 < L) activate(arch.activation, z);
    acts.push_back(std::move(z));
  }
  return acts;
}

void check_finite_outputs(const Matrix& out) {
  if (!out.allFinite()) throw NumericError("non-finite network output (diverged parameters?)");
}

// Log-likelihood of every row plus d(loglik)/d(output) for the backward pass.
double output_loglik(const MlpArchitecture& arch, const Dataset& data, const Matrix& out,
                     Matrix* dout) {
  const Eigen::Index n = out.rows();
  double total = 0.0;
  if (dout) dout->resize(out.rows(), out.cols());
  if (arch.task == Task::classification) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = out.row(i).maxCoeff();
      const double lse = m + std::log((out.row(i).array() - m).exp().sum());
      const int y = data.label(static_cast<std::size_t>(i));
      total += out(i, y) - lse;
      if (dout) {
        dout->row(i) = -(out.row(i).array() - lse).exp().matrix();
        (*dout)(i, y) += 1.0;
      }
    }
  } else {
    const double s2 = arch.noise_sigma * arch.noise_sigma;
    const double log_norm = kHalfLog2Pi + std::log(arch.noise_sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < out.cols(); ++k) {
        const double r = data.targets(i) - out(i, k);
        total += -0.5 * r * r / s2 - log_norm;
        if (dout) (*dout)(i, k) = r / s2;
      }
    }
  }
  return total;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }
std::string to_string(Task t) { return t == Task::classification ? "classification" : "regression"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "' (expected relu or tanh)");
}

Task parse_task(const std::string& s) {
  if (s == "classification") return Task::classification;
  if (s == "regression") return Task::regression;
  throw ConfigError("unknown task '" + s + "' (expected classification or regression)");
}

void MlpArchitecture::validate() const {
  require(layer_sizes.size() >= 2, "architecture needs at least an input and an output layer");
  for (int s : layer_sizes) require(s >= 1, "layer sizes must be >= 1");
  require(noise_sigma > 0.0 && std::isfinite(noise_sigma), "noise_sigma must be positive");
  if (task == Task::classification) require(output_dim() >= 2, "classification needs >= 2 classes");
}

std::size_t MlpArchitecture::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(layer_sizes[l]);
    const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
    n += in * out + (bias ? out : 0);
  }
  return n;
}

std::size_t MlpArchitecture::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    const auto in = static_cast<std::size_t>(layer_sizes[l]);
    const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
    off += in * out + (bias ? out : 0);
  }
  return off;
}

std::size_t MlpArchitecture::bias_offset(std::size_t layer) const {
  return weight_offset(layer) +
         static_cast<std::size_t>(layer_sizes[layer]) * static_cast<std::size_t>(layer_sizes[layer + 1]);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.name = name;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
    out.targets(static_cast<Eigen::Index>(i)) = targets(r);
  }
  return out;
}

void Dataset::check_compatible(const MlpArchitecture& arch) const {
  require_length("dataset targets", size(), static_cast<std::size_t>(targets.size()));
  if (size() > 0) require_length("dataset input dimension", static_cast<std::size_t>(arch.input_dim()),
                                 static_cast<std::size_t>(dim()));
  if (arch.task == Task::classification) {
    for (Eigen::Index i = 0; i < targets.size(); ++i) {
      const double t = targets(i);
      if (t < 0 || t >= arch.output_dim() || t != std::floor(t)) {
        throw ConfigError("class index " + std::to_string(t) + " at row " + std::to_string(i) +
                          " outside [0, " + std::to_string(arch.output_dim()) + ")");
      }
    }
  }
}

std::vector<Layer> unflatten(const MlpArchitecture& arch, const ParamVector& params) {
  check_params(arch, params);
  std::vector<Layer> layers(arch.layer_count());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weights = weight_view(arch, params, l);
    if (arch.bias) {
      layers[l].bias = Eigen::Map<const Vector>(params.data() + arch.bias_offset(l), arch.layer_sizes[l + 1]);
    }
  }
  return layers;
}

ParamVector flatten(const MlpArchitecture& arch, const std::vector<Layer>& layers) {
  require_length("layer list", arch.layer_count(), layers.size());
  ParamVector p(static_cast<Eigen::Index>(arch.parameter_count()));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const int in = arch.layer_sizes[l];
    const int out = arch.layer_sizes[l + 1];
    require(layers[l].weights.rows() == out && layers[l].weights.cols() == in,
            "layer " + std::to_string(l) + " weight shape mismatch");
    Eigen::Map<RowMatrix>(p.data() + arch.weight_offset(l), out, in) = layers[l].weights;
    if (arch.bias) {
      require_length("layer bias", static_cast<std::size_t>(out), static_cast<std::size_t>(layers[l].bias.size()));
      Eigen::Map<Vector>(p.data() + arch.bias_offset(l), out) = layers[l].bias;
    }
  }
  return p;
}

Matrix forward_batch(const MlpArchitecture& arch, const ParamVector& params, const Matrix& inputs) {
  check_params(arch, params);
  require_length("input dimension", static_cast<std::size_t>(arch.input_dim()),
                 static_cast<std::size_t>(inputs.cols()));
  return std::move(forward_trace(arch, params, inputs).back());
}

Vector forward(const MlpArchitecture& arch, const ParamVector& params, const Vector& x) {
  require_length("input vector", static_cast<std::size_t>(arch.input_dim()), static_cast<std::size_t>(x.size()));
  return forward_batch(arch, params, x.transpose()).row(0).transpose();
}

double log_likelihood(const MlpArchitecture& arch, const ParamVector& params, const Dataset& data) {
  data.check_compatible(arch);
  const Matrix out = forward_batch(arch, params, data.inputs);
  check_finite_outputs(out);
  return output_loglik(arch, data, out, nullptr);
}

ValueAndGradient log_likelihood_and_grad(const MlpArchitecture& arch, const ParamVector& params,
                                         const Dataset& data) {
  check_params(arch, params);
  data.check_compatible(arch);
  ValueAndGradient res;
  res.gradient = ParamVector::Zero(params.size());
  if (data.size() == 0) return res;

  const std::vector<Matrix> acts = forward_trace(arch, params, data.inputs);
  check_finite_outputs(acts.back());
  Matrix delta;
  res.value = output_loglik(arch, data, acts.back(), &delta);

  for (std::size_t l = arch.layer_count(); l-- > 0;) {
    const int in = arch.layer_sizes[l];
    const int out = arch.layer_sizes[l + 1];
    Eigen::Map<RowMatrix>(res.gradient.data() + arch.weight_offset(l), out, in) = delta.transpose() * acts[l];
    if (arch.bias) {
      Eigen::Map<Vector>(res.gradient.data() + arch.bias_offset(l), out) = delta.colwise().sum().transpose();
    }
    if (l > 0) {
      Matrix back = delta * weight_view(arch, params, l);
      delta = back.cwiseProduct(activation_derivative(arch.activation, acts[l]));
    }
  }
  if (!res.gradient.allFinite()) throw NumericError("non-finite log-likelihood gradient");
  return res;
}

ParamVector grad_log_likelihood(const MlpArchitecture& arch, const ParamVector& params,
                                const Dataset& data) {
  return log_likelihood_and_grad(arch, params, data).gradient;
}

Vector softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

Matrix predict_proba_batch(const MlpArchitecture& arch, const ParamVector& params, const Matrix& inputs) {
  if (arch.task != Task::classification) throw ConfigError("predict_proba requires a classification task");
  Matrix out = forward_batch(arch, params, inputs);
  check_finite_outputs(out);
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = softmax(out.row(i).transpose()).transpose();
  return out;
}

Vector predict_proba(const MlpArchitecture& arch, const ParamVector& params, const Vector& x) {
  require_length("input vector", static_cast<std::size_t>(arch.input_dim()), static_cast<std::size_t>(x.size()));
  return predict_proba_batch(arch, params, x.transpose()).row(0).transpose();
}

ParamVector initialize(const MlpArchitecture& arch, Rng& rng) {
  ParamVector p = ParamVector::Zero(static_cast<Eigen::Index>(arch.parameter_count()));
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    const int in = arch.layer_sizes[l];
    const int out = arch.layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    const std::size_t off = arch.weight_offset(l);
    for (int k = 0; k < in * out; ++k) {
      p(static_cast<Eigen::Index>(off) + k) = scale * standard_normal(rng);
    }
  }
  return p;
}

}  // namespace sae
