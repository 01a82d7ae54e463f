#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rafs/adam.hpp"
#include "rafs/dataset.hpp"
#include "rafs/mlp.hpp"
#include "rafs/regularization.hpp"
#include "rafs/rng.hpp"

namespace rafs {

// Isotropic Gaussian prior N(mean, variance * I) over all parameters.
struct PriorSpec {
  double mean = 0.0;
  double variance = 2.0;

  void validate() const;  // throws DomainError unless variance > 0
};

struct TrainConfig {
  std::size_t epochs = 3000;  // full-batch optimizer steps, no early stopping
  AdamHyperparams adam;
  double noise_var = 0.0;     // sigma_a^2 estimate, in the units of the training targets
  std::vector<std::size_t> hidden = {100};
  bool standardize = true;    // applied by the ensemble layer, not by train_member

  void validate() const;
};

// Gamma = noise_var * Sigma0^{-1}.
RegMatrix compute_reg_matrix(double noise_var, const PriorSpec& prior, std::size_t param_count);

// (1/n)||y - f(X)||^2 + (1/n)||Gamma^{1/2}(theta - theta0)||^2, evaluated
// through forward() only.
double anchored_loss(const MlpParams& params, const MlpParams& anchor, const RegMatrix& gamma,
                     const Matrix& X, std::span<const double> y);

// i.i.d. N(prior.mean, prior.variance) draws for every parameter.
MlpParams sample_anchor(const PriorSpec& prior, const Architecture& arch,
                        ActivationKind activation, Rng& rng);

struct TrainedMember {
  MlpParams trained;
  MlpParams anchor;
};

// Runs exactly config.epochs optimizer steps on the anchored loss starting at
// `init`. Throws DivergenceError carrying the epoch of the first non-finite
// loss.
MlpParams fit_anchored(MlpParams init, const MlpParams& anchor, const RegMatrix& gamma,
                       const Matrix& X, std::span<const double> y, const TrainConfig& config);

// One ensemble member: draw an anchor from the prior, start at it and
// minimize the anchored loss. Trains on `data` as given; standardization is
// the caller's responsibility.
TrainedMember train_member(const Dataset& data, const TrainConfig& config,
                           ActivationKind activation, const PriorSpec& prior, Rng& rng);

}  // namespace rafs
