#include "rafs/activation.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "activation_kernels.hpp"
#include "rafs/errors.hpp"

namespace rafs {

namespace {

void check_finite(ActivationKind kind, double z) {
  if (!std::isfinite(z)) {
    throw DomainError("activation " + std::string(to_string(kind)) +
                      ": non-finite input " + std::to_string(z));
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

double activation_eval(ActivationKind kind, double z) {
  check_finite(kind, z);
  return detail::act_value(kind, z);
}

double activation_grad(ActivationKind kind, double z) {
  check_finite(kind, z);
  return detail::act_deriv(kind, z);
}

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::GELU: return "GELU";
    case ActivationKind::Softsign: return "Softsign";
    case ActivationKind::Swish: return "Swish";
    case ActivationKind::SELU: return "SELU";
    case ActivationKind::Tanh: return "Tanh";
    case ActivationKind::Erf: return "Erf";
    case ActivationKind::Linear: return "Linear";
  }
  return "?";
}

std::optional<ActivationKind> parse_activation(std::string_view name) {
  const std::string key = lowercase(name);
  for (ActivationKind k : kAllActivations) {
    if (lowercase(to_string(k)) == key) return k;
  }
  if (key == "identity") return ActivationKind::Linear;
  return std::nullopt;
}

}  // namespace rafs
