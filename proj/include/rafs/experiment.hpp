#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rafs/ensemble.hpp"
#include "rafs/ingest.hpp"
#include "rafs/metrics.hpp"
#include "rafs/synthetic.hpp"

namespace rafs {

// Parses a method label as produced by method_label: "RAFs", "AE(Tanh)",
// "DE", "RP", "RP(beta=3)", "RP(beta=1,nobootstrap)". "AE" alone means
// AE(Tanh).
std::optional<MethodKind> parse_method(std::string_view label);

struct DatasetSpec {
  std::string name;
  std::optional<GeneratorId> generator;
  std::optional<IngestSpec> ingest;

  std::size_t dim() const;
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<MethodKind> methods;
  std::size_t m = 5;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  PriorSpec prior;
  EnsembleConfig ensemble;
  std::vector<std::size_t> m_values{2, 3, 5, 7, 10};
  std::vector<std::size_t> k_values{1, 2, 3, 4, 5, 6, 7};
  std::string out_dir = "results";
  std::string data_dir = "data";

  void validate() const;  // throws ConfigError
};

// TOML text; relative preset paths resolve against data_dir.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// "1-5", "1,2,7" or a mix such as "1-3,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct RunRecord {
  std::string dataset;
  std::string method;
  std::size_t m = 0;
  std::size_t k = 0;  // AF-set size for RAFs, 0 for the other methods
  std::uint64_t seed = 0;
  bool ok = false;
  double nll = 0.0;
  double rmse = 0.0;
  double noise_var = 0.0;
  std::string error;
  std::vector<CurvePoint> curve;
};

struct SummaryRow {
  std::string dataset;
  std::string method;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t n_runs = 0;
  std::size_t n_ok = 0;
  ConfidenceInterval nll;
  ConfidenceInterval rmse;
  int nll_rank = 0;
  int rmse_rank = 0;
  std::vector<std::uint64_t> seeds;
};

// Groups successful runs by (dataset, method, m, k) in order of first
// appearance and ranks the groups within each (dataset, m). Groups with one
// successful run get a NaN half-width; groups with none get NaN means and
// rank 0.
std::vector<SummaryRow> aggregate_runs(const std::vector<RunRecord>& runs);

// Train/test pair for one run. Generators are resampled per seed; ingest
// datasets are split with split_seed (or the run seed) and get the default
// noise estimate 0.01 * Var(y_train) unless configured.
class DataRegistry {
 public:
  explicit DataRegistry(const std::vector<DatasetSpec>& specs);
  std::pair<Dataset, Dataset> get(std::size_t index, std::uint64_t seed) const;
  std::size_t dropped_rows(std::size_t index) const { return dropped_.at(index); }

 private:
  std::vector<DatasetSpec> specs_;
  std::vector<std::optional<Dataset>> loaded_;
  std::vector<std::size_t> dropped_;
  std::vector<std::string> errors_;  // load failure per ingest dataset
};

struct RunTask {
  std::size_t dataset = 0;
  MethodKind method;
  std::size_t m = 0;
  std::vector<ActivationKind> af_set;
  std::uint64_t seed = 0;
};

// Runs every task on `jobs` worker threads. Output order follows the task
// list and results do not depend on `jobs`. Failures are recorded per run.
std::vector<RunRecord> execute_runs(const ExperimentConfig& config, const DataRegistry& data,
                                    const std::vector<RunTask>& tasks, std::size_t jobs);

struct RunOutcome {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
  bool all_ok = true;
};

// Each writes its result files into config.out_dir.
RunOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs);
RunOutcome run_ablation_m(const ExperimentConfig& config, const std::vector<std::size_t>& m_values,
                          std::size_t jobs);
RunOutcome run_ablation_k(const ExperimentConfig& config, const std::vector<std::size_t>& k_values,
                          std::size_t jobs);

// Columns kind, x, y, mean, lower, upper, truth. "grid" rows cover the test
// range with `points` values (lower/upper = mean -+ 2 sd, y empty); "train"
// rows carry the training points (x, y only). Throws ShapeError unless the
// generator is one-dimensional.
std::string emit_band_data(const EnsembleModel& model, GeneratorId id, const Dataset& train,
                           std::size_t points = 400);

// Trains every configured method on the first seed of each 1-D generator
// dataset and writes bands/<dataset>__<method>.tsv. Returns false if any
// training failed.
bool run_band(const ExperimentConfig& config, std::size_t jobs);

// Report files.
std::string runs_csv(const std::vector<RunRecord>& runs);
std::vector<RunRecord> parse_runs_csv(std::string_view text);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string ranks_csv(const std::vector<SummaryRow>& rows);
std::string curve_tsv(const std::vector<RunRecord>& runs);
std::string ablation_tsv(const std::vector<SummaryRow>& rows, std::string_view key);
std::string meta_json(const ExperimentConfig& config, std::string_view command, std::size_t jobs);

// Safe file-name fragment: alphanumerics kept, everything else becomes '_'.
std::string file_stem(std::string_view label);

}  // namespace rafs
