#include "rafs/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rafs/errors.hpp"
#include "rafs/rng.hpp"
#include "rafs/text.hpp"

namespace rafs {

std::string_view to_string(ColumnTransform t) {
  return t == ColumnTransform::Ln1p ? "ln1p" : "identity";
}

std::optional<ColumnTransform> parse_transform(std::string_view name) {
  if (name == "identity") return ColumnTransform::Identity;
  if (name == "ln1p") return ColumnTransform::Ln1p;
  return std::nullopt;
}

ColumnTransform IngestSpec::transform_for(const std::string& column) const {
  for (const auto& [col, t] : transforms) {
    if (col == column) return t;
  }
  return ColumnTransform::Identity;
}

void IngestSpec::validate() const {
  if (path.empty()) throw ConfigError(name + ": ingest spec needs a path");
  if (target.empty()) throw ConfigError(name + ": ingest spec needs a target column");
  if (features.empty()) throw ConfigError(name + ": feature list is empty");
  if (noise_var && !(*noise_var > 0.0)) throw ConfigError(name + ": noise_var must be > 0");
}

double apply_transform(ColumnTransform t, double v) {
  if (t == ColumnTransform::Identity) return v;
  if (!(v > -1.0)) throw DomainError("ln1p needs values > -1, got " + format_double(v));
  return std::log1p(v);
}

double invert_transform(ColumnTransform t, double v) {
  return t == ColumnTransform::Ln1p ? std::expm1(v) : v;
}

namespace {

IngestSpec preset(std::string name, std::string file, std::string target,
                  std::vector<std::string> features, std::size_t n_train, std::size_t n_test) {
  IngestSpec spec;
  spec.name = std::move(name);
  spec.path = std::move(file);
  spec.target = std::move(target);
  spec.features = std::move(features);
  spec.n_train = n_train;
  spec.n_test = n_test;
  return spec;
}

const std::vector<IngestSpec>& presets() {
  static const std::vector<IngestSpec> all = [] {
    std::vector<IngestSpec> v;
    v.push_back(preset("Boston", "boston.csv", "MEDV", {"RM"}, 354, 152));
    v.push_back(preset("Abalone", "abalone.csv", "Rings",
                       {"Length", "Diameter", "Height", "Whole weight", "Shucked weight"}, 1880,
                       2297));
    v.push_back(preset("Naval", "naval.csv", "kMt", {"GTT", "GTn", "T48", "Pexh"}, 5370, 6564));
    IngestSpec fire = preset("ForestFire", "forestfires.csv", "area",
                             {"FFMC", "DMC", "DC", "ISI", "temp", "RH"}, 200, 317);
    fire.transforms.emplace_back("area", ColumnTransform::Ln1p);
    v.push_back(std::move(fire));
    v.push_back(preset("Parkinsons", "parkinsons_updrs.csv", "total_UPDRS",
                       {"NHR", "HNR", "DFA", "PPE", "RPDE"}, 2643, 3232));
    return v;
  }();
  return all;
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Splits one CSV record starting at `pos`; advances past the line ending.
std::vector<std::string> next_record(std::string_view text, std::size_t& pos, std::size_t line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
      ++pos;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      break;
    } else {
      field.push_back(c);
      ++pos;
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line) + ": unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  const std::string l = lower(cell);
  return l.empty() || l == "na" || l == "nan" || l == "?" || l == "null";
}

double apply(ColumnTransform t, double v, const std::string& where) {
  try {
    return apply_transform(t, v);
  } catch (const DomainError& e) {
    throw DataError(where + ": " + e.what());
  }
}

}  // namespace

std::optional<IngestSpec> ingest_preset(std::string_view name, const std::string& data_dir) {
  const std::string key = lower(name);
  for (const auto& p : presets()) {
    if (lower(p.name) == key) {
      IngestSpec spec = p;
      if (!data_dir.empty()) spec.path = data_dir + "/" + spec.path;
      return spec;
    }
  }
  return std::nullopt;
}

const std::vector<std::string>& ingest_preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& p : presets()) v.push_back(p.name);
    return v;
  }();
  return names;
}

LoadResult parse_csv(std::string_view text, const IngestSpec& spec, const std::string& source) {
  if (spec.features.empty()) throw DataError(source + ": feature list is empty");
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t pos = 0;
  std::size_t line = 1;
  if (trim(text).empty()) throw DataError(source + ": empty file");
  const std::vector<std::string> header = next_record(text, pos, line);

  auto column_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw DataError(source + ": missing column '" + name + "'");
  };
  std::vector<std::size_t> cols;
  for (const auto& f : spec.features) cols.push_back(column_of(f));
  cols.push_back(column_of(spec.target));
  std::vector<ColumnTransform> transforms;
  for (const auto& f : spec.features) transforms.push_back(spec.transform_for(f));
  transforms.push_back(spec.transform_for(spec.target));

  LoadResult result;
  std::vector<double> values;
  std::vector<double> row(cols.size());
  std::size_t n = 0;
  while (pos < text.size()) {
    ++line;
    const std::vector<std::string> fields = next_record(text, pos, line);
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    bool missing = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::string& col_name = header[cols[k]];
      if (cols[k] >= fields.size()) {
        missing = true;
        break;
      }
      const std::string_view cell = trim(fields[cols[k]]);
      if (is_missing(cell)) {
        missing = true;
        break;
      }
      const std::string where =
          source + ": row " + std::to_string(line) + ", column '" + std::string(trim(col_name)) + "'";
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(where + ": cannot parse '" + std::string(cell) + "' as a number");
      }
      row[k] = apply(transforms[k], v, where);
    }
    if (missing) {
      ++result.dropped_rows;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    ++n;
  }
  if (n == 0) throw DataError(source + ": no usable rows");

  Dataset& d = result.data;
  d.name = spec.name.empty() ? source : spec.name;
  d.split = "full";
  d.source = source;
  d.feature_names = spec.features;
  d.target_name = spec.target;
  d.X = Matrix(n, spec.features.size());
  d.y.resize(n);
  const std::size_t width = cols.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) d.X(i, j) = values[i * width + j];
    d.y[i] = values[i * width + width - 1];
  }
  return result;
}

LoadResult load_csv(const IngestSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + spec.path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), spec, spec.path);
}

std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t n_train, std::size_t n_test,
                                  std::uint64_t seed) {
  if (n_train == 0 || n_test == 0) throw DataError(data.name + ": split sizes must be >= 1");
  if (n_train + n_test > data.rows()) {
    throw DataError(data.name + ": split needs " + std::to_string(n_train + n_test) +
                    " rows, have " + std::to_string(data.rows()));
  }
  std::vector<std::size_t> idx(data.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = make_stream(seed, 0, "split");
  // Fisher-Yates with an explicit bounded draw, so the permutation does not
  // depend on the standard library's distribution implementation.
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(idx[i - 1], idx[r % bound]);
  }
  const std::span<const std::size_t> all(idx);
  return {subset(data, all.subspan(0, n_train), "train"),
          subset(data, all.subspan(n_train, n_test), "test")};
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    return q + "\"";
  };
  for (std::size_t j = 0; j < data.dim(); ++j) {
    out += quote(j < data.feature_names.size() ? data.feature_names[j] : "x" + std::to_string(j + 1));
    out += ',';
  }
  out += quote(data.target_name) + '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) out += format_double(data.X(i, j)) + ',';
    out += format_double(data.y[i]) + '\n';
  }
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << dataset_to_csv(data);
}

}  // namespace rafs
