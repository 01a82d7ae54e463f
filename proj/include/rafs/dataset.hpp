#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rafs/matrix.hpp"

namespace rafs {

// Regression data: design matrix, targets, and the (known or estimated)
// aleatoric noise variance.
struct Dataset {
  Matrix X;
  std::vector<double> y;
  double noise_var = 0.0;
  std::string name;
  std::string split;   // "train", "test" or "full"
  std::string source;  // "generator:<id>" or a CSV path
  std::vector<std::string> feature_names;
  std::string target_name = "y";

  std::size_t rows() const { return X.rows; }
  std::size_t dim() const { return X.cols; }

  // Throws DataError when X and y disagree or noise_var is negative.
  void validate() const;
};

Dataset subset(const Dataset& data, std::span<const std::size_t> rows, std::string split);

// Affine standardization of features and target fitted on a training set.
// Columns with zero spread keep unit scale.
struct Standardizer {
  std::vector<double> x_mean;
  std::vector<double> x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;

  static Standardizer fit(const Dataset& train);
  static Standardizer identity(std::size_t dim);

  Matrix transform_x(const Matrix& X) const;
  std::vector<double> transform_y(std::span<const double> y) const;
  double inverse_y(double y_std) const { return y_std * y_scale + y_mean; }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

// Population mean and (n-denominator) variance of a vector.
double mean_of(std::span<const double> v);
double variance_of(std::span<const double> v);

}  // namespace rafs
