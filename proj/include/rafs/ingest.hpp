#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rafs/dataset.hpp"

namespace rafs {

enum class ColumnTransform { Identity, Ln1p };

std::string_view to_string(ColumnTransform t);
std::optional<ColumnTransform> parse_transform(std::string_view name);
double apply_transform(ColumnTransform t, double v);
double invert_transform(ColumnTransform t, double v);

struct IngestSpec {
  std::string name;
  std::string path;
  std::string target;
  std::vector<std::string> features;
  // Keyed by column name (feature or target); unlisted columns are identity.
  std::vector<std::pair<std::string, ColumnTransform>> transforms;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::optional<std::uint64_t> split_seed;  // defaults to the run seed
  std::optional<double> noise_var;          // defaults to 0.01 * Var(y_train)

  ColumnTransform transform_for(const std::string& column) const;
  void validate() const;  // throws ConfigError
};

// Built-in specs for the five real-world datasets. `path` is relative to
// data_dir.
std::optional<IngestSpec> ingest_preset(std::string_view name, const std::string& data_dir);
const std::vector<std::string>& ingest_preset_names();

struct LoadResult {
  Dataset data;
  std::size_t dropped_rows = 0;  // rows with a missing value in a selected column
};

// Parses a comma-separated file with a header row. Quoted fields are
// supported. Errors name the row (1-based, header = 1) and column.
LoadResult load_csv(const IngestSpec& spec);
LoadResult parse_csv(std::string_view text, const IngestSpec& spec, const std::string& source);

// Disjoint uniformly random train/test rows; leftovers are discarded.
std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t n_train, std::size_t n_test,
                                  std::uint64_t seed);

// Header of feature names then the target, shortest round-trip numbers.
std::string dataset_to_csv(const Dataset& data);
void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace rafs
