#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <tuple>

#include <json.hpp>

#include "rafs/errors.hpp"
#include "rafs/experiment.hpp"
#include "rafs/text.hpp"

namespace rafs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c == '\n' || c == '\r' ? ' ' : c);
  }
  return q + "\"";
}

std::string unquote(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::string(s);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    out.push_back(s[i]);
    if (s[i] == '"' && i + 2 < s.size() && s[i + 1] == '"') ++i;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("runs.csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

double real_or_nan(std::string_view s, std::size_t line) {
  return s.empty() ? kNaN : parse_number<double>(s, line);
}

std::string real_or_empty(double v, bool present) { return present ? format_double(v) : ""; }

}  // namespace

std::string file_stem(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    out.push_back(keep ? c : '_');
  }
  return out;
}

std::vector<SummaryRow> aggregate_runs(const std::vector<RunRecord>& runs) {
  using Key = std::tuple<std::string, std::string, std::size_t, std::size_t>;
  std::vector<SummaryRow> rows;
  std::map<Key, std::size_t> index;
  std::vector<std::vector<double>> nll, err;
  for (const auto& r : runs) {
    const Key key{r.dataset, r.method, r.m, r.k};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      SummaryRow row;
      row.dataset = r.dataset;
      row.method = r.method;
      row.m = r.m;
      row.k = r.k;
      rows.push_back(row);
      nll.emplace_back();
      err.emplace_back();
    }
    SummaryRow& row = rows[it->second];
    ++row.n_runs;
    if (r.ok) {
      ++row.n_ok;
      row.seeds.push_back(r.seed);
      nll[it->second].push_back(r.nll);
      err[it->second].push_back(r.rmse);
    }
  }

  auto interval = [](const std::vector<double>& scores) {
    if (scores.empty()) return ConfidenceInterval{kNaN, kNaN};
    if (scores.size() == 1) return ConfidenceInterval{scores[0], kNaN};
    return aggregate_ci(scores);
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].nll = interval(nll[i]);
    rows[i].rmse = interval(err[i]);
  }

  // Ranks among rows sharing (dataset, m). k is not part of the cell: RAFs
  // rows carry their AF-set size while the baselines have k = 0.
  using Cell = std::pair<std::string, std::size_t>;
  std::map<Cell, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].n_ok > 0) cells[Cell{rows[i].dataset, rows[i].m}].push_back(i);
  }
  for (const auto& [cell, members] : cells) {
    (void)cell;
    for (int metric = 0; metric < 2; ++metric) {
      std::vector<ConfidenceInterval> scores;
      for (std::size_t i : members) {
        ConfidenceInterval ci = metric == 0 ? rows[i].nll : rows[i].rmse;
        if (std::isnan(ci.half_width)) ci.half_width = 0.0;
        scores.push_back(ci);
      }
      const std::vector<int> ranks = rank_methods(scores);
      for (std::size_t j = 0; j < members.size(); ++j) {
        (metric == 0 ? rows[members[j]].nll_rank : rows[members[j]].rmse_rank) = ranks[j];
      }
    }
  }
  return rows;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
  std::string out = "dataset,method,m,k,seed,status,nll,rmse,noise_var,error\n";
  for (const auto& r : runs) {
    out += csv_field(r.dataset) + ',' + csv_field(r.method) + ',' + std::to_string(r.m) + ',' +
           std::to_string(r.k) + ',' + std::to_string(r.seed) + ',' + (r.ok ? "ok" : "error") + ',' +
           real_or_empty(r.nll, r.ok) + ',' + real_or_empty(r.rmse, r.ok) + ',' +
           real_or_empty(r.noise_var, r.ok) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(std::string_view text) {
  std::vector<RunRecord> runs;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view row = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (line == 1 || row.empty()) continue;

    // Fields 0..8 never contain commas except for quoted labels; split with
    // quote awareness and let the last field take the remainder.
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (fields.size() < 9 && i <= row.size()) {
      std::size_t j = i;
      if (j < row.size() && row[j] == '"') {
        ++j;
        while (j < row.size() && !(row[j] == '"' && (j + 1 == row.size() || row[j + 1] == ','))) ++j;
        ++j;
      } else {
        while (j < row.size() && row[j] != ',') ++j;
      }
      fields.push_back(unquote(row.substr(i, j - i)));
      i = j + 1;
    }
    if (fields.size() < 9) throw DataError("runs.csv line " + std::to_string(line) + ": too few fields");
    fields.push_back(i <= row.size() ? unquote(row.substr(i)) : "");

    RunRecord r;
    r.dataset = fields[0];
    r.method = fields[1];
    r.m = parse_number<std::size_t>(fields[2], line);
    r.k = parse_number<std::size_t>(fields[3], line);
    r.seed = parse_number<std::uint64_t>(fields[4], line);
    r.ok = fields[5] == "ok";
    r.nll = real_or_nan(fields[6], line);
    r.rmse = real_or_nan(fields[7], line);
    r.noise_var = real_or_nan(fields[8], line);
    r.error = fields[9];
    if (!r.ok) r.nll = r.rmse = r.noise_var = 0.0;
    runs.push_back(std::move(r));
  }
  return runs;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "dataset,method,m,k,n_runs,n_ok,nll_mean,nll_ci,rmse_mean,rmse_ci,nll_rank,rmse_rank\n";
  for (const auto& r : rows) {
    out += csv_field(r.dataset) + ',' + csv_field(r.method) + ',' + std::to_string(r.m) + ',' +
           std::to_string(r.k) + ',' + std::to_string(r.n_runs) + ',' + std::to_string(r.n_ok) + ',' +
           format_double(r.nll.mean) + ',' + format_double(r.nll.half_width) + ',' +
           format_double(r.rmse.mean) + ',' + format_double(r.rmse.half_width) + ',' +
           std::to_string(r.nll_rank) + ',' + std::to_string(r.rmse_rank) + '\n';
  }
  return out;
}

std::string ranks_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "dataset,method,nll_rank,rmse_rank\n";
  std::vector<std::string> methods;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_method;
  for (const auto& r : rows) {
    out += csv_field(r.dataset) + ',' + csv_field(r.method) + ',' + std::to_string(r.nll_rank) + ',' +
           std::to_string(r.rmse_rank) + '\n';
    if (!per_method.count(r.method)) methods.push_back(r.method);
    auto& acc = per_method[r.method];
    if (r.nll_rank > 0) {
      acc.first.push_back(r.nll_rank);
      acc.second.push_back(r.rmse_rank);
    }
  }
  // Mean rank over datasets, one row per method.
  for (const auto& method : methods) {
    const auto& [a, b] = per_method[method];
    auto mean = [](const std::vector<double>& v) {
      if (v.empty()) return kNaN;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    out += "ALL," + csv_field(method) + ',' + format_double(mean(a)) + ',' + format_double(mean(b)) + '\n';
  }
  return out;
}

std::string curve_tsv(const std::vector<RunRecord>& runs) {
  std::string out = "dataset\tmethod\tm\tk\tseed\tthreshold\trmse\tcoverage\tgap\n";
  for (const auto& r : runs) {
    for (const auto& p : r.curve) {
      out += r.dataset + '\t' + r.method + '\t' + std::to_string(r.m) + '\t' + std::to_string(r.k) +
             '\t' + std::to_string(r.seed) + '\t' + format_double(p.threshold) + '\t' +
             (p.gap ? std::string() : format_double(p.rmse)) + '\t' + format_double(p.coverage) +
             '\t' + (p.gap ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::string ablation_tsv(const std::vector<SummaryRow>& rows, std::string_view key) {
  if (key != "m" && key != "k") throw DomainError("ablation_tsv: key must be m or k");
  std::string out = "dataset\tmethod\t" + std::string(key) +
                    "\tn_ok\tnll_mean\tnll_ci\trmse_mean\trmse_ci\n";
  for (const auto& r : rows) {
    out += r.dataset + '\t' + r.method + '\t' + std::to_string(key == "m" ? r.m : r.k) + '\t' +
           std::to_string(r.n_ok) + '\t' + format_double(r.nll.mean) + '\t' +
           format_double(r.nll.half_width) + '\t' + format_double(r.rmse.mean) + '\t' +
           format_double(r.rmse.half_width) + '\n';
  }
  return out;
}

std::string meta_json(const ExperimentConfig& config, std::string_view command, std::size_t jobs) {
  nlohmann::json doc;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  doc["timestamp"] = stamp;
  doc["command"] = std::string(command);
  doc["jobs"] = jobs;
  doc["out_dir"] = config.out_dir;
  doc["m"] = config.m;
  doc["seeds"] = config.seeds;
  std::vector<std::string> methods, datasets;
  for (const auto& m : config.methods) methods.push_back(method_label(m));
  for (const auto& d : config.datasets) datasets.push_back(d.name);
  doc["methods"] = methods;
  doc["datasets"] = datasets;
  doc["epochs"] = config.ensemble.train.epochs;
  doc["hidden"] = config.ensemble.train.hidden;
  doc["prior_variance"] = config.prior.variance;
  return doc.dump(2) + "\n";
}

}  // namespace rafs
