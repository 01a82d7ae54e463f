#include "rafs/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "rafs/errors.hpp"
#include "rafs/text.hpp"

namespace rafs {

namespace fs = std::filesystem;

namespace {

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::size_t af_count(const MethodKind& method, const std::vector<ActivationKind>& af_set) {
  return std::holds_alternative<RafsMethod>(method) ? af_set.size() : 0;
}

void write_common(const ExperimentConfig& config, const RunOutcome& outcome,
                  std::string_view command, std::size_t jobs) {
  const fs::path out(config.out_dir);
  write_file(out / "runs.csv", runs_csv(outcome.runs));
  write_file(out / "summary.csv", summary_csv(outcome.summary));
  write_file(out / "ranks.csv", ranks_csv(outcome.summary));
  write_file(out / "meta.json", meta_json(config, command, jobs));
}

RunOutcome finish(std::vector<RunRecord> runs) {
  RunOutcome outcome;
  outcome.runs = std::move(runs);
  outcome.summary = aggregate_runs(outcome.runs);
  for (const auto& r : outcome.runs) outcome.all_ok = outcome.all_ok && r.ok;
  return outcome;
}

}  // namespace

std::size_t DatasetSpec::dim() const {
  if (generator) return generator_info(*generator).dim;
  return ingest ? ingest->features.size() : 0;
}

DataRegistry::DataRegistry(const std::vector<DatasetSpec>& specs)
    : specs_(specs), loaded_(specs.size()), dropped_(specs.size(), 0), errors_(specs.size()) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (!specs_[i].ingest) continue;
    try {
      LoadResult res = load_csv(*specs_[i].ingest);
      res.data.name = specs_[i].name;
      dropped_[i] = res.dropped_rows;
      loaded_[i] = std::move(res.data);
    } catch (const std::exception& e) {
      errors_[i] = e.what();
    }
  }
}

std::pair<Dataset, Dataset> DataRegistry::get(std::size_t index, std::uint64_t seed) const {
  const DatasetSpec& spec = specs_.at(index);
  if (spec.generator) {
    auto pair = sample_dataset(*spec.generator, seed);
    pair.first.name = pair.second.name = spec.name;
    return pair;
  }
  if (!loaded_[index]) throw DataError(errors_[index]);
  const IngestSpec& ingest = *spec.ingest;
  auto [train, test] = split(*loaded_[index], ingest.n_train, ingest.n_test,
                             ingest.split_seed.value_or(seed));
  const double noise = ingest.noise_var.value_or(0.01 * variance_of(train.y));
  train.noise_var = test.noise_var = noise;
  return {std::move(train), std::move(test)};
}

std::vector<RunRecord> execute_runs(const ExperimentConfig& config, const DataRegistry& data,
                                    const std::vector<RunTask>& tasks, std::size_t jobs) {
  std::vector<RunRecord> records(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const RunTask& task = tasks[i];
    RunRecord& r = records[i];
    r.dataset = config.datasets.at(task.dataset).name;
    r.method = method_label(task.method);
    r.m = task.m;
    r.k = af_count(task.method, task.af_set);
    r.seed = task.seed;
    try {
      const auto [train, test] = data.get(task.dataset, task.seed);
      EnsembleConfig ec = config.ensemble;
      ec.af_set = task.af_set;
      const EnsembleModel model = train_ensemble(train, task.method, task.m, config.prior, ec, task.seed);
      const PredictiveEstimate est = predict(model, test.X);
      r.nll = gaussian_nll(est, test.y);
      r.rmse = rmse(est.mean, test.y);
      r.noise_var = model.noise_var;
      r.curve = confidence_error_curve(est, test.y, default_thresholds(est));
      if (!std::isfinite(r.nll) || !std::isfinite(r.rmse)) throw NumericError("non-finite score");
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
      r.curve.clear();
    }
  });
  return records;
}

RunOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  const DataRegistry data(config.datasets);
  std::vector<RunTask> tasks;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (const auto& method : config.methods) {
      for (std::uint64_t seed : config.seeds) {
        tasks.push_back({d, method, config.m, config.ensemble.af_set, seed});
      }
    }
  }
  RunOutcome outcome = finish(execute_runs(config, data, tasks, jobs));
  write_common(config, outcome, "run", jobs);

  // One curve file per (dataset, method), rows ordered by seed.
  const fs::path curves = fs::path(config.out_dir) / "curves";
  std::size_t start = 0;
  while (start < outcome.runs.size()) {
    std::size_t end = start;
    while (end < outcome.runs.size() && outcome.runs[end].dataset == outcome.runs[start].dataset &&
           outcome.runs[end].method == outcome.runs[start].method) {
      ++end;
    }
    const std::vector<RunRecord> group(outcome.runs.begin() + start, outcome.runs.begin() + end);
    write_file(curves / (file_stem(group.front().dataset) + "__" + file_stem(group.front().method) + ".tsv"),
               curve_tsv(group));
    start = end;
  }
  return outcome;
}

RunOutcome run_ablation_m(const ExperimentConfig& config, const std::vector<std::size_t>& m_values,
                          std::size_t jobs) {
  config.validate();
  if (m_values.empty()) throw ConfigError("ablate-m: no m values");
  for (std::size_t m : m_values) {
    if (m < 2) throw ConfigError("ablate-m: every m must be >= 2");
  }
  const DataRegistry data(config.datasets);
  std::vector<RunTask> tasks;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (const auto& method : config.methods) {
      for (std::size_t m : m_values) {
        for (std::uint64_t seed : config.seeds) {
          tasks.push_back({d, method, m, config.ensemble.af_set, seed});
        }
      }
    }
  }
  RunOutcome outcome = finish(execute_runs(config, data, tasks, jobs));
  write_common(config, outcome, "ablate-m", jobs);
  write_file(fs::path(config.out_dir) / "curves" / "ablation_m.tsv", ablation_tsv(outcome.summary, "m"));
  return outcome;
}

RunOutcome run_ablation_k(const ExperimentConfig& config, const std::vector<std::size_t>& k_values,
                          std::size_t jobs) {
  config.validate();
  if (k_values.empty()) throw ConfigError("ablate-k: no k values");
  for (std::size_t k : k_values) {
    if (k < 1 || k > kAllActivations.size()) throw ConfigError("ablate-k: k must be in [1, 7]");
  }
  const DataRegistry data(config.datasets);
  std::vector<RunTask> tasks;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (std::size_t k : k_values) {
      const std::vector<ActivationKind> af(kAllActivations.begin(), kAllActivations.begin() + k);
      for (std::uint64_t seed : config.seeds) tasks.push_back({d, RafsMethod{}, config.m, af, seed});
    }
  }
  RunOutcome outcome = finish(execute_runs(config, data, tasks, jobs));
  write_common(config, outcome, "ablate-k", jobs);
  write_file(fs::path(config.out_dir) / "curves" / "ablation_k.tsv", ablation_tsv(outcome.summary, "k"));
  return outcome;
}

std::string emit_band_data(const EnsembleModel& model, GeneratorId id, const Dataset& train,
                           std::size_t points) {
  const GeneratorInfo& info = generator_info(id);
  if (info.dim != 1) {
    throw ShapeError(std::string(info.name) + ": band data needs a one-dimensional dataset");
  }
  if (train.dim() != 1) throw ShapeError(shape_message("band training data dimension", 1, train.dim()));
  if (points < 2) throw DomainError("emit_band_data: need at least 2 grid points");
  const double lo = info.test_box[0].lo;
  const double hi = info.test_box[0].hi;
  Matrix grid(points, 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid(i, 0) = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const PredictiveEstimate est = predict(model, grid);
  std::string out = "kind\tx\ty\tmean\tlower\tupper\ttruth\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x = grid(i, 0);
    const double half = 2.0 * std::sqrt(est.total_var[i]);
    const double truth = generator_eval(id, std::span<const double>(&x, 1));
    out += "grid\t" + format_double(x) + "\t\t" + format_double(est.mean[i]) + '\t' +
           format_double(est.mean[i] - half) + '\t' + format_double(est.mean[i] + half) + '\t' +
           format_double(truth) + '\n';
  }
  for (std::size_t i = 0; i < train.rows(); ++i) {
    out += "train\t" + format_double(train.X(i, 0)) + '\t' + format_double(train.y[i]) + "\t\t\t\t\n";
  }
  return out;
}

bool run_band(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  struct Job {
    std::size_t dataset;
    MethodKind method;
  };
  std::vector<Job> work;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    const auto& spec = config.datasets[d];
    if (!spec.generator || generator_info(*spec.generator).dim != 1) {
      throw ConfigError("band: dataset '" + spec.name + "' is not a one-dimensional generator");
    }
    for (const auto& method : config.methods) work.push_back({d, method});
  }
  const DataRegistry data(config.datasets);
  const std::uint64_t seed = config.seeds.front();
  std::vector<std::string> outputs(work.size());
  std::vector<std::string> errors(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    try {
      const auto [train, test] = data.get(work[i].dataset, seed);
      const EnsembleModel model =
          train_ensemble(train, work[i].method, config.m, config.prior, config.ensemble, seed);
      outputs[i] = emit_band_data(model, *config.datasets[work[i].dataset].generator, train);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  bool ok = true;
  const fs::path bands = fs::path(config.out_dir) / "bands";
  for (std::size_t i = 0; i < work.size(); ++i) {
    const std::string stem =
        file_stem(config.datasets[work[i].dataset].name) + "__" + file_stem(method_label(work[i].method));
    if (!errors[i].empty()) {
      ok = false;
      write_file(bands / (stem + ".error"), errors[i] + "\n");
      continue;
    }
    write_file(bands / (stem + ".tsv"), outputs[i]);
  }
  write_file(fs::path(config.out_dir) / "meta.json", meta_json(config, "band", jobs));
  return ok;
}

}  // namespace rafs
