#include "rafs/dataset.hpp"

#include <cmath>

#include "rafs/errors.hpp"

namespace rafs {

void Dataset::validate() const {
  if (X.rows != y.size()) {
    throw DataError(name + ": " + shape_message("target rows", X.rows, y.size()));
  }
  if (!(noise_var >= 0.0)) throw DataError(name + ": noise variance must be >= 0");
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows, std::string split) {
  Dataset out;
  out.X = select_rows(data.X, rows);
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(data.y[r]);
  out.noise_var = data.noise_var;
  out.name = data.name;
  out.split = std::move(split);
  out.source = data.source;
  out.feature_names = data.feature_names;
  out.target_name = data.target_name;
  return out;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

Standardizer Standardizer::fit(const Dataset& train) {
  train.validate();
  if (train.rows() == 0) throw DataError(train.name + ": cannot standardize an empty dataset");
  Standardizer s;
  const std::size_t d = train.dim();
  s.x_mean.assign(d, 0.0);
  s.x_scale.assign(d, 1.0);
  std::vector<double> column(train.rows());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < train.rows(); ++i) column[i] = train.X(i, j);
    s.x_mean[j] = mean_of(column);
    const double sd = std::sqrt(variance_of(column));
    s.x_scale[j] = sd > 0.0 ? sd : 1.0;
  }
  s.y_mean = mean_of(train.y);
  const double sd = std::sqrt(variance_of(train.y));
  s.y_scale = sd > 0.0 ? sd : 1.0;
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  Standardizer s;
  s.x_mean.assign(dim, 0.0);
  s.x_scale.assign(dim, 1.0);
  return s;
}

Matrix Standardizer::transform_x(const Matrix& X) const {
  if (X.cols != x_mean.size()) {
    throw ShapeError(shape_message("standardizer feature dimension", x_mean.size(), X.cols));
  }
  Matrix out(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t j = 0; j < X.cols; ++j) out(i, j) = (X(i, j) - x_mean[j]) / x_scale[j];
  }
  return out;
}

std::vector<double> Standardizer::transform_y(std::span<const double> y) const {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - y_mean) / y_scale;
  return out;
}

}  // namespace rafs
