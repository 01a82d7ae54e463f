#include "rafs/adam.hpp"

#include <cmath>

#include "rafs/errors.hpp"

namespace rafs {

OptimizerState OptimizerState::fresh(std::size_t param_count, AdamHyperparams hyper) {
  OptimizerState s;
  s.first_moment.assign(param_count, 0.0);
  s.second_moment.assign(param_count, 0.0);
  s.hyper = hyper;
  return s;
}

void optimizer_step_inplace(std::span<double> params, std::span<const double> grads,
                            OptimizerState& state) {
  if (grads.size() != params.size()) {
    throw ShapeError(shape_message("gradient length", params.size(), grads.size()));
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw ShapeError(shape_message("optimizer state length", params.size(),
                                   state.first_moment.size()));
  }
  const AdamHyperparams& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double g = grads[p];
    if (!std::isfinite(g)) throw NumericError("optimizer: non-finite gradient entry");
    double& m = state.first_moment[p];
    double& v = state.second_moment[p];
    m = h.beta1 * m + (1.0 - h.beta1) * g;
    v = h.beta2 * v + (1.0 - h.beta2) * g * g;
    params[p] -= h.step_size * (m / bc1) / (std::sqrt(v / bc2) + h.epsilon);
  }
}

std::pair<std::vector<double>, OptimizerState> optimizer_step(std::span<const double> params,
                                                              std::span<const double> grads,
                                                              OptimizerState state) {
  std::vector<double> next(params.begin(), params.end());
  optimizer_step_inplace(next, grads, state);
  return {std::move(next), std::move(state)};
}

}  // namespace rafs
