#include "rafs/anchored.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rafs/errors.hpp"

namespace rafs {

void PriorSpec::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw DomainError("invalid prior: variance must be finite and > 0");
  }
}

void TrainConfig::validate() const {
  if (epochs == 0) throw DomainError("training config: epochs must be > 0");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw DomainError("training config: noise variance must be finite and >= 0");
  }
  for (std::size_t h : hidden) {
    if (h == 0) throw DomainError("training config: hidden layer width must be > 0");
  }
  if (!(adam.step_size > 0.0)) throw DomainError("training config: step size must be > 0");
}

RegMatrix compute_reg_matrix(double noise_var, const PriorSpec& prior, std::size_t param_count) {
  prior.validate();
  if (!(noise_var >= 0.0)) throw DomainError("regularization: noise variance must be >= 0");
  return RegMatrix::constant(param_count, noise_var / prior.variance);
}

double anchored_loss(const MlpParams& params, const MlpParams& anchor, const RegMatrix& gamma,
                     const Matrix& X, std::span<const double> y) {
  if (X.rows == 0 || y.empty()) throw DataError("anchored loss: empty dataset");
  if (X.rows != y.size()) throw ShapeError(shape_message("target length", X.rows, y.size()));
  if (!params.same_shape(anchor)) throw ShapeError("anchor architecture differs from params");
  if (gamma.size() != params.param_count()) {
    throw ShapeError(shape_message("regularization matrix size", params.param_count(), gamma.size()));
  }
  const std::vector<double> pred = forward(params, X);
  const double n = static_cast<double>(y.size());
  double data_term = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) data_term += (y[i] - pred[i]) * (y[i] - pred[i]);
  double reg_term = 0.0;
  const auto& theta = params.flatten();
  const auto& theta0 = anchor.flatten();
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double scaled = std::sqrt(gamma.diagonal[p]) * (theta[p] - theta0[p]);
    reg_term += scaled * scaled;
  }
  return data_term / n + reg_term / n;
}

MlpParams sample_anchor(const PriorSpec& prior, const Architecture& arch,
                        ActivationKind activation, Rng& rng) {
  prior.validate();
  std::normal_distribution<double> normal(prior.mean, std::sqrt(prior.variance));
  std::vector<double> values(arch.param_count());
  for (double& v : values) v = normal(rng);
  return MlpParams(arch, activation, std::move(values));
}

MlpParams fit_anchored(MlpParams init, const MlpParams& anchor, const RegMatrix& gamma,
                       const Matrix& X, std::span<const double> y, const TrainConfig& config) {
  config.validate();
  OptimizerState state = OptimizerState::fresh(init.param_count(), config.adam);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    LossAndGradient lg;
    try {
      lg = anchored_objective(init, anchor, gamma, X, y);
    } catch (const NumericError& e) {
      throw DivergenceError("epoch " + std::to_string(epoch) + ": " + e.what(), epoch);
    }
    if (!std::isfinite(lg.loss)) {
      throw DivergenceError("epoch " + std::to_string(epoch) + ": non-finite anchored loss",
                            epoch);
    }
    optimizer_step_inplace(init.values(), lg.gradient, state);
  }
  return init;
}

TrainedMember train_member(const Dataset& data, const TrainConfig& config,
                           ActivationKind activation, const PriorSpec& prior, Rng& rng) {
  data.validate();
  config.validate();
  if (data.rows() == 0) throw DataError(data.name + ": empty training set");
  Architecture arch{data.dim(), config.hidden, 1};
  MlpParams anchor = sample_anchor(prior, arch, activation, rng);
  const RegMatrix gamma = compute_reg_matrix(config.noise_var, prior, arch.param_count());
  MlpParams trained = fit_anchored(anchor, anchor, gamma, data.X, data.y, config);
  return {std::move(trained), std::move(anchor)};
}

}  // namespace rafs
