#include "rafs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rafs/errors.hpp"

namespace rafs {

double gaussian_nll(std::span<const double> mean, std::span<const double> var,
                    std::span<const double> y) {
  if (mean.size() != y.size() || var.size() != y.size()) {
    throw ShapeError(shape_message("gaussian_nll inputs", y.size(),
                                   mean.size() != y.size() ? mean.size() : var.size()));
  }
  if (y.empty()) throw DomainError("gaussian_nll: no points");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(var[i] > 0.0) || !std::isfinite(var[i])) {
      throw DomainError("gaussian_nll: variance at point " + std::to_string(i) + " is not positive");
    }
    const double r = y[i] - mean[i];
    s += 0.5 * std::log(2.0 * std::numbers::pi * var[i]) + r * r / (2.0 * var[i]);
  }
  return s / static_cast<double>(y.size());
}

double gaussian_nll(const PredictiveEstimate& est, std::span<const double> y) {
  return gaussian_nll(est.mean, est.total_var, y);
}

double rmse(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size()) throw ShapeError(shape_message("rmse inputs", y.size(), pred.size()));
  if (y.empty()) throw DomainError("rmse: empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = pred[i] - y[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

std::vector<CurvePoint> confidence_error_curve(const PredictiveEstimate& est,
                                               std::span<const double> y,
                                               std::span<const double> thresholds) {
  if (est.size() != y.size() || est.total_var.size() != y.size()) {
    throw ShapeError(shape_message("confidence_error_curve inputs", y.size(), est.size()));
  }
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw DomainError("confidence_error_curve: thresholds must be ascending");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(thresholds.size());
  for (double tau : thresholds) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (1.0 / est.total_var[i] > tau) {
        const double r = est.mean[i] - y[i];
        s += r * r;
        ++count;
      }
    }
    CurvePoint p;
    p.threshold = tau;
    p.coverage = y.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(y.size());
    if (count == 0) {
      p.gap = true;
      p.rmse = std::numeric_limits<double>::quiet_NaN();
    } else {
      p.rmse = std::sqrt(s / static_cast<double>(count));
    }
    curve.push_back(p);
  }
  return curve;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile: no values");
  if (!(p >= 0.0 && p <= 100.0)) throw DomainError("percentile: p must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> default_thresholds(const PredictiveEstimate& est, std::size_t n) {
  if (n < 2) throw DomainError("default_thresholds: need at least 2 thresholds");
  std::vector<double> precision;
  precision.reserve(est.total_var.size());
  for (double v : est.total_var) {
    if (!(v > 0.0)) throw DomainError("default_thresholds: non-positive variance");
    precision.push_back(1.0 / v);
  }
  const double lo = std::log(percentile(precision, 5.0));
  const double hi = std::log(percentile(precision, 95.0));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  // exp(log(x)) can land a hair off; keep the grid ascending.
  for (std::size_t i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

ConfidenceInterval aggregate_ci(std::span<const double> scores) {
  if (scores.size() < 2) throw DomainError("aggregate_ci: need at least 2 scores");
  // Summing in sorted order makes the result independent of score order.
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double r = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / r;
  double ss = 0.0;
  for (double s : sorted) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (r - 1.0));
  return {mean, 1.96 * sd / std::sqrt(r)};
}

std::vector<int> rank_methods(std::span<const ConfidenceInterval> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].mean < scores[b].mean; });

  // Union-find over pairwise overlaps.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double lo_a = scores[a].mean - scores[a].half_width;
      const double hi_a = scores[a].mean + scores[a].half_width;
      const double lo_b = scores[b].mean - scores[b].half_width;
      const double hi_b = scores[b].mean + scores[b].half_width;
      if (lo_a <= hi_b && lo_b <= hi_a) parent[find(a)] = find(b);
    }
  }

  std::vector<int> rank(n, 0);
  std::vector<int> group_rank(n, 0);
  int next = 0;
  for (std::size_t i : order) {
    const std::size_t g = find(i);
    if (group_rank[g] == 0) group_rank[g] = ++next;
    rank[i] = group_rank[g];
  }
  return rank;
}

}  // namespace rafs
