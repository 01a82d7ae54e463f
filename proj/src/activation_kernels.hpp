#pragma once

#include <cmath>
#include <numbers>

#include "rafs/activation.hpp"

namespace rafs::detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)); }

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Unchecked activation value; callers validate finiteness.
inline double act_value(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::GELU: return z * normal_cdf(z);
    case ActivationKind::Softsign: return z / (1.0 + std::abs(z));
    case ActivationKind::Swish: return z * sigmoid(z);
    case ActivationKind::SELU:
      return z > 0.0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * std::expm1(z);
    case ActivationKind::Tanh: return std::tanh(z);
    case ActivationKind::Erf: return std::erf(z);
    case ActivationKind::Linear: return z;
  }
  return z;
}

inline double act_deriv(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::GELU: return normal_cdf(z) + z * normal_pdf(z);
    case ActivationKind::Softsign: {
      const double d = 1.0 + std::abs(z);
      return 1.0 / (d * d);
    }
    case ActivationKind::Swish: {
      const double s = sigmoid(z);
      return s + z * s * (1.0 - s);
    }
    case ActivationKind::SELU:
      return z > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
    case ActivationKind::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::Erf: return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-z * z);
    case ActivationKind::Linear: return 1.0;
  }
  return 1.0;
}

}  // namespace rafs::detail
