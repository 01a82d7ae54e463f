#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rafs/ensemble.hpp"

namespace rafs {

// Mean over points of 0.5 ln(2 pi var) + (y - mean)^2 / (2 var). Throws
// DomainError on a non-positive variance.
double gaussian_nll(const PredictiveEstimate& est, std::span<const double> y);
double gaussian_nll(std::span<const double> mean, std::span<const double> var,
                    std::span<const double> y);

double rmse(std::span<const double> pred, std::span<const double> y);

struct CurvePoint {
  double threshold = 0.0;
  double rmse = 0.0;      // NaN when the subset is empty
  double coverage = 0.0;  // fraction of points with precision > threshold
  bool gap = false;       // empty subset
};

// RMSE over the points whose precision 1/total_var exceeds each threshold.
// Thresholds must be ascending.
std::vector<CurvePoint> confidence_error_curve(const PredictiveEstimate& est,
                                               std::span<const double> y,
                                               std::span<const double> thresholds);

// n log-spaced thresholds between the 5th and 95th percentile of the
// predicted precisions.
std::vector<double> default_thresholds(const PredictiveEstimate& est, std::size_t n = 20);

// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

// mean +- 1.96 sd / sqrt(R) with the unbiased sd. Needs R >= 2.
ConfidenceInterval aggregate_ci(std::span<const double> scores);

// Dense ranks (1 = lowest mean) in input order. Methods whose intervals
// overlap share a rank, and the relation is closed transitively, so a chain
// of overlapping intervals forms one rank.
std::vector<int> rank_methods(std::span<const ConfidenceInterval> scores);

struct MetricsReport {
  std::string dataset;
  std::string method;
  std::vector<std::uint64_t> seeds;
  double nll = 0.0;
  double rmse = 0.0;
  double nll_ci = 0.0;
  double rmse_ci = 0.0;
  std::vector<CurvePoint> curve;
};

}  // namespace rafs
