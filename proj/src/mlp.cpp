#include "rafs/mlp.hpp"

#include <cmath>
#include <string>

#include "activation_kernels.hpp"
#include "rafs/errors.hpp"

namespace rafs {

std::string shape_message(const std::string& what, std::size_t expected, std::size_t actual) {
  return what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual);
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= m.rows) throw ShapeError(shape_message("row index bound", m.rows, indices[r]));
    auto src = m.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::size_t Architecture::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden[layer - 1];
}

std::size_t Architecture::fan_out(std::size_t layer) const {
  return layer == hidden.size() ? output_dim : hidden[layer];
}

std::size_t Architecture::param_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) total += fan_out(l) * fan_in(l) + fan_out(l);
  return total;
}

MlpParams::MlpParams(Architecture arch, ActivationKind activation)
    : arch_(std::move(arch)), activation_(activation), values_(arch_.param_count(), 0.0) {}

MlpParams::MlpParams(Architecture arch, ActivationKind activation, std::vector<double> values)
    : arch_(std::move(arch)), activation_(activation), values_(std::move(values)) {
  if (values_.size() != arch_.param_count()) {
    throw ShapeError(shape_message("parameter vector length", arch_.param_count(), values_.size()));
  }
}

MlpParams MlpParams::from_layers(const std::vector<Matrix>& weights,
                                 const std::vector<std::vector<double>>& biases,
                                 ActivationKind activation) {
  if (weights.empty() || weights.size() != biases.size()) {
    throw ShapeError("from_layers: need one bias vector per weight matrix");
  }
  Architecture arch;
  arch.input_dim = weights.front().cols;
  arch.hidden.clear();
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix& w = weights[l];
    if (l > 0 && w.cols != weights[l - 1].rows) {
      throw ShapeError(shape_message("layer " + std::to_string(l) + " input width",
                                     weights[l - 1].rows, w.cols));
    }
    if (biases[l].size() != w.rows) {
      throw ShapeError(shape_message("layer " + std::to_string(l) + " bias length", w.rows,
                                     biases[l].size()));
    }
    if (l + 1 < weights.size()) arch.hidden.push_back(w.rows);
    flat.insert(flat.end(), w.data.begin(), w.data.end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  arch.output_dim = weights.back().rows;
  return MlpParams(std::move(arch), activation, std::move(flat));
}

MlpParams MlpParams::unflatten(const Architecture& arch, ActivationKind activation,
                               std::span<const double> flat) {
  return MlpParams(arch, activation, std::vector<double>(flat.begin(), flat.end()));
}

LayerView MlpParams::layer(std::size_t index) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < index; ++l) {
    offset += arch_.fan_out(l) * arch_.fan_in(l) + arch_.fan_out(l);
  }
  LayerView view;
  view.in = arch_.fan_in(index);
  view.out = arch_.fan_out(index);
  std::span<const double> all(values_);
  view.weights = all.subspan(offset, view.out * view.in);
  view.bias = all.subspan(offset + view.out * view.in, view.out);
  return view;
}

namespace {

// out = in * W^T + b, accumulated input-major so the inner loop is contiguous.
Matrix affine(const Matrix& in, const LayerView& layer, std::size_t layer_index) {
  Matrix wt(layer.in, layer.out);
  for (std::size_t o = 0; o < layer.out; ++o) {
    for (std::size_t k = 0; k < layer.in; ++k) wt(k, o) = layer.weight(o, k);
  }
  Matrix out(in.rows, layer.out);
  for (std::size_t i = 0; i < in.rows; ++i) {
    double* z = out.data.data() + i * layer.out;
    for (std::size_t o = 0; o < layer.out; ++o) z[o] = layer.bias[o];
    for (std::size_t k = 0; k < layer.in; ++k) {
      const double a = in(i, k);
      const double* w = wt.data.data() + k * layer.out;
      for (std::size_t o = 0; o < layer.out; ++o) z[o] += a * w[o];
    }
  }
  for (double v : out.data) {
    if (!std::isfinite(v)) {
      throw NumericError("layer " + std::to_string(layer_index) +
                         ": non-finite pre-activation");
    }
  }
  return out;
}

void check_input(const MlpParams& params, const Matrix& X) {
  if (X.cols != params.architecture().input_dim) {
    throw ShapeError(shape_message("input feature dimension", params.architecture().input_dim,
                                   X.cols));
  }
}

}  // namespace

ForwardCache forward_cached(const MlpParams& params, const Matrix& X) {
  check_input(params, X);
  const Architecture& arch = params.architecture();
  const ActivationKind act = params.activation();
  ForwardCache cache;
  cache.pre.reserve(arch.hidden.size());
  cache.post.reserve(arch.hidden.size());
  for (std::size_t l = 0; l < arch.hidden.size(); ++l) {
    const Matrix& in = l == 0 ? X : cache.post.back();
    Matrix z = affine(in, params.layer(l), l);
    Matrix a(z.rows, z.cols);
    for (std::size_t e = 0; e < z.data.size(); ++e) a.data[e] = detail::act_value(act, z.data[e]);
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(a));
  }
  const Matrix& last = arch.hidden.empty() ? X : cache.post.back();
  cache.output = affine(last, params.layer(arch.hidden.size()), arch.hidden.size());
  return cache;
}

Matrix forward_outputs(const MlpParams& params, const Matrix& X) {
  return forward_cached(params, X).output;
}

std::vector<double> forward(const MlpParams& params, const Matrix& X) {
  if (params.architecture().output_dim != 1) {
    throw ShapeError(shape_message("output dimension", 1, params.architecture().output_dim));
  }
  return forward_outputs(params, X).data;
}

std::vector<double> backprop(const MlpParams& params, const Matrix& X, const ForwardCache& cache,
                             const Matrix& output_grad) {
  const Architecture& arch = params.architecture();
  if (output_grad.rows != X.rows || output_grad.cols != arch.output_dim) {
    throw ShapeError(shape_message("output gradient width", arch.output_dim, output_grad.cols));
  }
  std::vector<double> grad(params.param_count(), 0.0);
  std::vector<std::size_t> offsets(arch.layer_count());
  for (std::size_t l = 0, off = 0; l < arch.layer_count(); ++l) {
    offsets[l] = off;
    off += arch.fan_out(l) * arch.fan_in(l) + arch.fan_out(l);
  }

  Matrix delta = output_grad;
  for (std::size_t l = arch.layer_count(); l-- > 0;) {
    const LayerView layer = params.layer(l);
    const Matrix& in = l == 0 ? X : cache.post[l - 1];
    double* gw = grad.data() + offsets[l];
    double* gb = gw + layer.out * layer.in;
    for (std::size_t i = 0; i < in.rows; ++i) {
      const double* a = in.data.data() + i * layer.in;
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double g = delta(i, o);
        gb[o] += g;
        double* row = gw + o * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k) row[k] += g * a[k];
      }
    }
    if (l == 0) break;

    Matrix prev(in.rows, layer.in);
    for (std::size_t i = 0; i < in.rows; ++i) {
      double* p = prev.data.data() + i * layer.in;
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double g = delta(i, o);
        const double* w = layer.weights.data() + o * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k) p[k] += g * w[k];
      }
      const double* z = cache.pre[l - 1].data.data() + i * layer.in;
      for (std::size_t k = 0; k < layer.in; ++k) p[k] *= detail::act_deriv(params.activation(), z[k]);
    }
    delta = std::move(prev);
  }
  return grad;
}

namespace {

void check_anchored_shapes(const MlpParams& params, const MlpParams& anchor,
                           const RegMatrix& gamma, const Matrix& X, std::span<const double> y) {
  if (!params.same_shape(anchor)) throw ShapeError("anchor architecture differs from params");
  if (gamma.size() != params.param_count()) {
    throw ShapeError(shape_message("regularization matrix size", params.param_count(), gamma.size()));
  }
  if (params.architecture().output_dim != 1) {
    throw ShapeError(shape_message("output dimension", 1, params.architecture().output_dim));
  }
  if (X.rows != y.size()) throw ShapeError(shape_message("target length", X.rows, y.size()));
  if (X.rows == 0) throw DataError("anchored loss: empty dataset");
}

}  // namespace

LossAndGradient anchored_objective(const MlpParams& params, const MlpParams& anchor,
                                   const RegMatrix& gamma, const Matrix& X,
                                   std::span<const double> y) {
  check_anchored_shapes(params, anchor, gamma, X, y);
  const double n = static_cast<double>(X.rows);
  ForwardCache cache = forward_cached(params, X);

  Matrix out_grad(X.rows, 1);
  double data_term = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double r = cache.output(i, 0) - y[i];
    data_term += r * r;
    out_grad(i, 0) = 2.0 * r / n;
  }

  LossAndGradient result;
  result.gradient = backprop(params, X, cache, out_grad);
  const auto& theta = params.flatten();
  const auto& theta0 = anchor.flatten();
  double reg_term = 0.0;
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double d = theta[p] - theta0[p];
    reg_term += gamma.diagonal[p] * d * d;
    result.gradient[p] += 2.0 * gamma.diagonal[p] * d / n;
  }
  result.loss = data_term / n + reg_term / n;
  return result;
}

std::vector<double> loss_gradient(const MlpParams& params, const MlpParams& anchor,
                                  const RegMatrix& gamma, const Matrix& X,
                                  std::span<const double> y) {
  return anchored_objective(params, anchor, gamma, X, y).gradient;
}

}  // namespace rafs
