#include "rafs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rafs/errors.hpp"

namespace rafs {

namespace {

constexpr double kLogVarMin = -10.0;
constexpr double kLogVarMax = 10.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Random init for the networks that are not anchored: N(0, 1/fan_in) weights,
// zero biases.
MlpParams fan_in_init(const Architecture& arch, ActivationKind activation, Rng& rng) {
  MlpParams params(arch, activation);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t offset = 0;
  auto& values = params.values();
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    const std::size_t in = arch.fan_in(l);
    const std::size_t out = arch.fan_out(l);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t p = 0; p < in * out; ++p) values[offset + p] = scale * normal(rng);
    offset += in * out + out;
  }
  return params;
}

// Gaussian NLL of a two-output (mean, log-variance) network, up to the
// ln(2 pi)/2 constant; the log-variance is clamped to [-10, 10].
MlpParams fit_gaussian_nll(MlpParams params, const Matrix& X, std::span<const double> y,
                           const TrainConfig& config) {
  const double n = static_cast<double>(X.rows);
  OptimizerState state = OptimizerState::fresh(params.param_count(), config.adam);
  Matrix out_grad(X.rows, 2);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardCache cache;
    try {
      cache = forward_cached(params, X);
    } catch (const NumericError& e) {
      throw DivergenceError("epoch " + std::to_string(epoch) + ": " + e.what(), epoch);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double mu = cache.output(i, 0);
      const double raw = cache.output(i, 1);
      const double s = std::clamp(raw, kLogVarMin, kLogVarMax);
      const double inv_var = std::exp(-s);
      const double r = y[i] - mu;
      loss += 0.5 * s + 0.5 * r * r * inv_var;
      out_grad(i, 0) = -r * inv_var / n;
      const bool active = raw > kLogVarMin && raw < kLogVarMax;
      out_grad(i, 1) = active ? (0.5 - 0.5 * r * r * inv_var) / n : 0.0;
    }
    if (!std::isfinite(loss)) {
      throw DivergenceError("epoch " + std::to_string(epoch) + ": non-finite NLL", epoch);
    }
    const std::vector<double> grad = backprop(params, X, cache, out_grad);
    optimizer_step_inplace(params.values(), grad, state);
  }
  return params;
}

}  // namespace

std::string method_label(const MethodKind& method) {
  return std::visit(
      overloaded{
          [](const RafsMethod&) { return std::string("RAFs"); },
          [](const AnchoredMethod& m) { return "AE(" + std::string(to_string(m.activation)) + ")"; },
          [](const DeepEnsembleMethod&) { return std::string("DE"); },
          [](const RandomizedPriorMethod& m) {
            return "RP(beta=" + format_number(m.beta) + (m.bootstrap ? "" : ",nobootstrap") + ")";
          },
      },
      method);
}

std::vector<ActivationKind> assign_activations(std::size_t m,
                                               const std::vector<ActivationKind>& af_set,
                                               Rng& rng) {
  if (af_set.empty()) throw DomainError("assign_activations: empty activation set");
  if (m == 0) throw DomainError("assign_activations: m must be >= 1");
  std::vector<ActivationKind> out;
  out.reserve(m);
  std::uniform_int_distribution<std::size_t> pick(0, af_set.size() - 1);
  for (std::size_t j = 0; j < m; ++j) {
    out.push_back(j < af_set.size() ? af_set[j] : af_set[pick(rng)]);
  }
  return out;
}

EnsembleModel train_ensemble(const Dataset& train, const MethodKind& method, std::size_t m,
                             const PriorSpec& prior, const EnsembleConfig& config,
                             std::uint64_t seed) {
  if (m < 2) throw DomainError("train_ensemble: m must be >= 2");
  train.validate();
  if (train.rows() == 0) throw DataError(train.name + ": empty training set");
  prior.validate();
  config.train.validate();
  if (const auto* rp = std::get_if<RandomizedPriorMethod>(&method); rp && !(rp->beta >= 0.0)) {
    throw DomainError("randomized prior: beta must be >= 0");
  }

  EnsembleModel model;
  model.method = method;
  model.noise_var = config.noise_var.value_or(train.noise_var);
  if (!(model.noise_var >= 0.0)) throw DomainError("train_ensemble: noise variance must be >= 0");
  model.standardizer = config.train.standardize ? Standardizer::fit(train)
                                                : Standardizer::identity(train.dim());
  const Matrix X = model.standardizer.transform_x(train.X);
  const std::vector<double> y = model.standardizer.transform_y(train.y);

  TrainConfig member_config = config.train;
  const double y_scale = model.standardizer.y_scale;
  member_config.noise_var = model.noise_var / (y_scale * y_scale);

  if (std::holds_alternative<RafsMethod>(method)) {
    Rng rng = make_stream(seed, 0, "activations");
    model.activations = assign_activations(m, config.af_set, rng);
  } else if (const auto* ae = std::get_if<AnchoredMethod>(&method)) {
    model.activations.assign(m, ae->activation);
  } else {
    model.activations.assign(m, config.baseline_activation);
  }

  Dataset standardized;
  standardized.X = X;
  standardized.y = y;
  standardized.name = train.name;
  standardized.noise_var = member_config.noise_var;

  const Architecture arch{train.dim(), config.train.hidden, 1};
  model.members.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const ActivationKind act = model.activations[j];
    try {
      EnsembleMember member;
      if (std::holds_alternative<RafsMethod>(method) ||
          std::holds_alternative<AnchoredMethod>(method)) {
        Rng rng = make_stream(seed, j, "anchor");
        TrainedMember tm = train_member(standardized, member_config, act, prior, rng);
        member.net = std::move(tm.trained);
        member.anchor = std::move(tm.anchor);
      } else if (std::holds_alternative<DeepEnsembleMethod>(method)) {
        Rng rng = make_stream(seed, j, "init");
        Architecture de_arch = arch;
        de_arch.output_dim = 2;
        member.net = fit_gaussian_nll(fan_in_init(de_arch, act, rng), X, y, member_config);
      } else {
        const auto& rp = std::get<RandomizedPriorMethod>(method);
        Rng init_rng = make_stream(seed, j, "init");
        Rng prior_rng = make_stream(seed, j, "prior");
        MlpParams init = fan_in_init(arch, act, init_rng);
        MlpParams prior_net = sample_anchor(prior, arch, act, prior_rng);

        std::vector<std::size_t> rows(X.rows);
        if (rp.bootstrap) {
          Rng boot_rng = make_stream(seed, j, "bootstrap");
          std::uniform_int_distribution<std::size_t> pick(0, X.rows - 1);
          for (auto& r : rows) r = pick(boot_rng);
        } else {
          for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        }
        const Matrix Xb = select_rows(X, rows);
        const std::vector<double> prior_out = forward(prior_net, Xb);
        std::vector<double> residual(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          residual[i] = y[rows[i]] - rp.beta * prior_out[i];
        }
        const RegMatrix none = RegMatrix::zeros(init.param_count());
        member.net = fit_anchored(init, init, none, Xb, residual, member_config);
        member.prior_net = std::move(prior_net);
      }
      model.members.push_back(std::move(member));
    } catch (const DivergenceError& e) {
      throw DivergenceError("member " + std::to_string(j) + ": " + e.what(), e.epoch());
    } catch (const NumericError& e) {
      throw NumericError("member " + std::to_string(j) + ": " + e.what());
    }
  }
  return model;
}

PredictiveEstimate aggregate_predictions(const std::vector<std::vector<double>>& member_preds,
                                         double noise_var) {
  const std::size_t m = member_preds.size();
  if (m < 2) throw DomainError("aggregate: need at least 2 members for the (m-1) divisor");
  const std::size_t n = member_preds.front().size();
  for (const auto& p : member_preds) {
    if (p.size() != n) throw ShapeError(shape_message("member prediction length", n, p.size()));
  }
  PredictiveEstimate est;
  est.mean.resize(n);
  est.epistemic_var.resize(n);
  est.total_var.resize(n);
  std::vector<double> column(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) column[j] = member_preds[j][i];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    est.mean[i] = mean;
    est.epistemic_var[i] = ss / static_cast<double>(m - 1);
    est.total_var[i] = est.epistemic_var[i] + noise_var;
  }
  return est;
}

PredictiveEstimate aggregate_mixture(const std::vector<std::vector<double>>& member_means,
                                     const std::vector<std::vector<double>>& member_vars) {
  PredictiveEstimate est = aggregate_predictions(member_means, 0.0);
  if (member_vars.size() != member_means.size()) {
    throw ShapeError(shape_message("member variance count", member_means.size(), member_vars.size()));
  }
  const std::size_t m = member_means.size();
  const std::size_t n = est.size();
  std::vector<double> column(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) column[j] = member_vars[j].at(i);
    std::sort(column.begin(), column.end());
    double var_sum = 0.0;
    for (double v : column) var_sum += v;
    // (1/m) sum (sigma_j^2 + mu_j^2) - mean^2, written in centred form.
    const double spread = est.epistemic_var[i] * static_cast<double>(m - 1) / static_cast<double>(m);
    est.total_var[i] = var_sum / static_cast<double>(m) + spread;
  }
  return est;
}

std::vector<std::vector<double>> member_predictions(const EnsembleModel& model, const Matrix& X) {
  const Matrix Xs = model.standardizer.transform_x(X);
  const auto* rp = std::get_if<RandomizedPriorMethod>(&model.method);
  std::vector<std::vector<double>> preds;
  preds.reserve(model.size());
  for (const auto& member : model.members) {
    std::vector<double> out;
    if (std::holds_alternative<DeepEnsembleMethod>(model.method)) {
      const Matrix o = forward_outputs(member.net, Xs);
      out.resize(o.rows);
      for (std::size_t i = 0; i < o.rows; ++i) out[i] = o(i, 0);
    } else {
      out = forward(member.net, Xs);
      if (rp) {
        const std::vector<double> p = forward(*member.prior_net, Xs);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += rp->beta * p[i];
      }
    }
    for (double& v : out) v = model.standardizer.inverse_y(v);
    preds.push_back(std::move(out));
  }
  return preds;
}

PredictiveEstimate predict(const EnsembleModel& model, const Matrix& X) {
  if (model.size() < 2) throw DomainError("predict: model needs at least 2 members");
  if (!std::holds_alternative<DeepEnsembleMethod>(model.method)) {
    return aggregate_predictions(member_predictions(model, X), model.noise_var);
  }
  const Matrix Xs = model.standardizer.transform_x(X);
  const double s2 = model.standardizer.y_scale * model.standardizer.y_scale;
  std::vector<std::vector<double>> means, vars;
  for (const auto& member : model.members) {
    const Matrix o = forward_outputs(member.net, Xs);
    std::vector<double> mu(o.rows), var(o.rows);
    for (std::size_t i = 0; i < o.rows; ++i) {
      mu[i] = model.standardizer.inverse_y(o(i, 0));
      var[i] = std::exp(std::clamp(o(i, 1), kLogVarMin, kLogVarMax)) * s2;
    }
    means.push_back(std::move(mu));
    vars.push_back(std::move(var));
  }
  return aggregate_mixture(means, vars);
}

}  // namespace rafs
