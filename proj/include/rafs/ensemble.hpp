#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rafs/activation.hpp"
#include "rafs/anchored.hpp"
#include "rafs/dataset.hpp"
#include "rafs/mlp.hpp"
#include "rafs/rng.hpp"

namespace rafs {

// Anchored ensemble whose members get different activations.
struct RafsMethod {
  friend bool operator==(const RafsMethod&, const RafsMethod&) = default;
};

// Anchored ensemble with one activation for every member.
struct AnchoredMethod {
  ActivationKind activation = ActivationKind::Tanh;
  friend bool operator==(const AnchoredMethod&, const AnchoredMethod&) = default;
};

// Mean/variance networks trained under Gaussian NLL from random init.
struct DeepEnsembleMethod {
  friend bool operator==(const DeepEnsembleMethod&, const DeepEnsembleMethod&) = default;
};

// Trainable network plus a frozen, beta-scaled random prior network, each
// member fitted to a bootstrap resample.
struct RandomizedPriorMethod {
  double beta = 1.0;
  bool bootstrap = true;
  friend bool operator==(const RandomizedPriorMethod&, const RandomizedPriorMethod&) = default;
};

using MethodKind = std::variant<RafsMethod, AnchoredMethod, DeepEnsembleMethod, RandomizedPriorMethod>;

// Stable identifier: "RAFs", "AE(Tanh)", "DE", "RP(beta=1)", "RP(beta=1,nobootstrap)".
std::string method_label(const MethodKind& method);

struct EnsembleConfig {
  TrainConfig train;
  std::vector<ActivationKind> af_set{kAllActivations.begin(), kAllActivations.end()};
  ActivationKind baseline_activation = ActivationKind::Tanh;  // DE and RP members
  std::optional<double> noise_var;  // overrides the dataset's sigma_a^2 when set
};

struct EnsembleMember {
  MlpParams net;
  std::optional<MlpParams> anchor;     // RAFs, AE
  std::optional<MlpParams> prior_net;  // RP

  friend bool operator==(const EnsembleMember&, const EnsembleMember&) = default;
};

struct EnsembleModel {
  MethodKind method;
  std::vector<EnsembleMember> members;
  std::vector<ActivationKind> activations;
  double noise_var = 0.0;  // sigma_a^2 in target units
  Standardizer standardizer;

  std::size_t size() const { return members.size(); }

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

struct PredictiveEstimate {
  std::vector<double> mean;
  std::vector<double> epistemic_var;
  std::vector<double> total_var;

  std::size_t size() const { return mean.size(); }
};

// Slot j < k gets af_set[j]; later slots draw uniformly (with replacement)
// from af_set.
std::vector<ActivationKind> assign_activations(std::size_t m,
                                               const std::vector<ActivationKind>& af_set,
                                               Rng& rng);

// Member j draws from streams derived from (seed, j, purpose), so members are
// independent of each other and of training order.
EnsembleModel train_ensemble(const Dataset& train, const MethodKind& method, std::size_t m,
                             const PriorSpec& prior, const EnsembleConfig& config,
                             std::uint64_t seed);

// Mean, unbiased member variance and total variance (member variance plus
// noise_var) from per-member predictions [m][n]. Per point, member values are
// combined in sorted order, so the result does not depend on member order.
PredictiveEstimate aggregate_predictions(const std::vector<std::vector<double>>& member_preds,
                                         double noise_var);

// Gaussian-mixture moments from per-member means and variances [m][n].
// epistemic_var is the unbiased variance of the member means.
PredictiveEstimate aggregate_mixture(const std::vector<std::vector<double>>& member_means,
                                     const std::vector<std::vector<double>>& member_vars);

// Per-member mean predictions in target units [m][n].
std::vector<std::vector<double>> member_predictions(const EnsembleModel& model, const Matrix& X);

PredictiveEstimate predict(const EnsembleModel& model, const Matrix& X);

// Versioned JSON model files.
std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(const std::string& path);

}  // namespace rafs
