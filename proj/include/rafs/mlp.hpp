#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rafs/activation.hpp"
#include "rafs/matrix.hpp"
#include "rafs/regularization.hpp"

namespace rafs {

// Layer widths of a fully-connected regression network.
struct Architecture {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden = {100};
  std::size_t output_dim = 1;

  std::size_t layer_count() const { return hidden.size() + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;
  std::size_t param_count() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Read-only view of one affine layer inside a flattened parameter vector.
// Weights are row-major [out x in], followed by the bias vector [out].
struct LayerView {
  std::size_t in = 0;
  std::size_t out = 0;
  std::span<const double> weights;
  std::span<const double> bias;

  double weight(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
};

// Parameters of a network whose hidden layers all use one activation and
// whose output layer is affine. The parameter vector is stored flattened,
// layer by layer (weights row-major, then biases).
class MlpParams {
public:
  MlpParams() = default;
  MlpParams(Architecture arch, ActivationKind activation);  // all zeros
  MlpParams(Architecture arch, ActivationKind activation, std::vector<double> values);

  // Builds from explicit (weight, bias) layers; dimensions must chain.
  static MlpParams from_layers(const std::vector<Matrix>& weights,
                               const std::vector<std::vector<double>>& biases,
                               ActivationKind activation);

  const Architecture& architecture() const { return arch_; }
  ActivationKind activation() const { return activation_; }
  std::size_t param_count() const { return values_.size(); }

  const std::vector<double>& flatten() const { return values_; }
  std::vector<double>& values() { return values_; }
  static MlpParams unflatten(const Architecture& arch, ActivationKind activation,
                             std::span<const double> flat);

  LayerView layer(std::size_t index) const;
  bool same_shape(const MlpParams& other) const { return arch_ == other.arch_; }

  friend bool operator==(const MlpParams&, const MlpParams&) = default;

private:
  Architecture arch_;
  ActivationKind activation_ = ActivationKind::Linear;
  std::vector<double> values_;
};

// Intermediate values of a batched forward pass, kept for backpropagation.
struct ForwardCache {
  std::vector<Matrix> pre;   // pre-activations of each hidden layer [n x width]
  std::vector<Matrix> post;  // activations of each hidden layer [n x width]
  Matrix output;             // network outputs [n x output_dim]
};

ForwardCache forward_cached(const MlpParams& params, const Matrix& X);

// Network outputs for every row of X [n x output_dim].
Matrix forward_outputs(const MlpParams& params, const Matrix& X);

// Scalar predictions for every row of X; requires output_dim == 1.
std::vector<double> forward(const MlpParams& params, const Matrix& X);

// Reverse-mode gradient of a loss with respect to the flattened parameters,
// given dLoss/dOutput for every row [n x output_dim].
std::vector<double> backprop(const MlpParams& params, const Matrix& X, const ForwardCache& cache,
                             const Matrix& output_grad);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

// Anchored objective
//   L(theta) = (1/n)||y - f(X)||^2 + (1/n)||Gamma^{1/2}(theta - anchor)||^2
// and its gradient, from one forward/backward pass.
LossAndGradient anchored_objective(const MlpParams& params, const MlpParams& anchor,
                                   const RegMatrix& gamma, const Matrix& X,
                                   std::span<const double> y);

// Gradient of the anchored objective.
std::vector<double> loss_gradient(const MlpParams& params, const MlpParams& anchor,
                                  const RegMatrix& gamma, const Matrix& X,
                                  std::span<const double> y);

}  // namespace rafs
