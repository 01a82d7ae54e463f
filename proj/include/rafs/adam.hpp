#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rafs {

struct AdamHyperparams {
  double step_size = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamHyperparams&, const AdamHyperparams&) = default;
};

// Adaptive-moment optimizer state; the accumulators have the shape of the
// flattened parameter vector.
struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step = 0;
  AdamHyperparams hyper;

  static OptimizerState fresh(std::size_t param_count, AdamHyperparams hyper = {});

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

// One bias-corrected Adam update. Pure: returns the new parameters and state.
std::pair<std::vector<double>, OptimizerState> optimizer_step(std::span<const double> params,
                                                              std::span<const double> grads,
                                                              OptimizerState state);

// In-place form of optimizer_step used by the training loops.
void optimizer_step_inplace(std::span<double> params, std::span<const double> grads,
                            OptimizerState& state);

}  // namespace rafs
