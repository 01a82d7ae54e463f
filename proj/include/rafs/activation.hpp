#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace rafs {

// Hidden-layer activation functions. The enumeration order is the canonical
// order of the activation set used by the RAFs ensemble.
enum class ActivationKind { GELU, Softsign, Swish, SELU, Tanh, Erf, Linear };

inline constexpr std::array<ActivationKind, 7> kAllActivations = {
    ActivationKind::GELU, ActivationKind::Softsign, ActivationKind::Swish,
    ActivationKind::SELU, ActivationKind::Tanh,     ActivationKind::Erf,
    ActivationKind::Linear};

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

// Throws DomainError on non-finite z.
double activation_eval(ActivationKind kind, double z);

// Exact derivative of activation_eval. SELU is not differentiable at 0; the
// negative-side derivative lambda*alpha is returned there.
double activation_grad(ActivationKind kind, double z);

std::string_view to_string(ActivationKind kind);
std::optional<ActivationKind> parse_activation(std::string_view name);

}  // namespace rafs
