#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "rafs/errors.hpp"
#include "rafs/experiment.hpp"

namespace rafs {

namespace {

std::string trim_copy(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return std::string(s);
}

void check_keys(const toml::table& tbl, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, node] : tbl) {
    (void)node;
    if (!allowed.count(std::string(key.str()))) {
      throw ConfigError(where + ": unknown key '" + std::string(key.str()) + "'");
    }
  }
}

std::string get_string(const toml::node& node, const std::string& where) {
  const auto v = node.value<std::string>();
  if (!v) throw ConfigError(where + ": expected a string");
  return *v;
}

double get_double(const toml::node& node, const std::string& where) {
  if (node.is_integer()) return static_cast<double>(*node.value<std::int64_t>());
  const auto v = node.value<double>();
  if (!v) throw ConfigError(where + ": expected a number");
  return *v;
}

std::int64_t get_int(const toml::node& node, const std::string& where) {
  if (!node.is_integer()) throw ConfigError(where + ": expected an integer");
  return *node.value<std::int64_t>();
}

std::size_t get_count(const toml::node& node, const std::string& where) {
  const std::int64_t v = get_int(node, where);
  if (v < 0) throw ConfigError(where + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

const toml::array& get_array(const toml::node& node, const std::string& where) {
  const toml::array* arr = node.as_array();
  if (!arr) throw ConfigError(where + ": expected an array");
  return *arr;
}

std::vector<std::string> get_strings(const toml::node& node, const std::string& where) {
  std::vector<std::string> out;
  for (const auto& item : get_array(node, where)) out.push_back(get_string(item, where));
  return out;
}

std::vector<std::size_t> get_counts(const toml::node& node, const std::string& where) {
  std::vector<std::size_t> out;
  for (const auto& item : get_array(node, where)) out.push_back(get_count(item, where));
  return out;
}

ActivationKind get_activation(const std::string& name, const std::string& where) {
  const auto act = parse_activation(name);
  if (!act) throw ConfigError(where + ": unknown activation '" + name + "'");
  return *act;
}

DatasetSpec resolve_dataset_name(const std::string& name, const std::string& data_dir) {
  DatasetSpec spec;
  spec.name = name;
  if (const auto id = parse_generator(name)) {
    spec.generator = id;
    spec.name = std::string(generator_info(*id).name);
    return spec;
  }
  if (auto preset = ingest_preset(name, data_dir)) {
    spec.name = preset->name;
    spec.ingest = std::move(preset);
    return spec;
  }
  throw ConfigError("unknown dataset '" + name + "'");
}

DatasetSpec parse_dataset_table(const toml::table& tbl, const std::string& data_dir) {
  const std::string where = "[[dataset]]";
  check_keys(tbl,
             {"name", "generator", "preset", "path", "target", "features", "transforms", "n_train",
              "n_test", "split_seed", "noise_var"},
             where);
  DatasetSpec spec;
  if (const auto* g = tbl.get("generator")) {
    spec = resolve_dataset_name(get_string(*g, where + ".generator"), data_dir);
    if (!spec.generator) throw ConfigError(where + ": '" + spec.name + "' is not a generator");
    if (tbl.size() > (tbl.contains("name") ? 2u : 1u)) {
      throw ConfigError(where + ": generator datasets take no ingest keys");
    }
    if (const auto* n = tbl.get("name")) spec.name = get_string(*n, where + ".name");
    return spec;
  }
  IngestSpec ingest;
  if (const auto* p = tbl.get("preset")) {
    const std::string name = get_string(*p, where + ".preset");
    auto preset = ingest_preset(name, data_dir);
    if (!preset) throw ConfigError(where + ": unknown preset '" + name + "'");
    ingest = std::move(*preset);
  }
  if (const auto* n = tbl.get("name")) ingest.name = get_string(*n, where + ".name");
  if (const auto* n = tbl.get("path")) ingest.path = get_string(*n, where + ".path");
  if (const auto* n = tbl.get("target")) ingest.target = get_string(*n, where + ".target");
  if (const auto* n = tbl.get("features")) ingest.features = get_strings(*n, where + ".features");
  if (const auto* n = tbl.get("transforms")) {
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError(where + ".transforms: expected a table");
    ingest.transforms.clear();
    for (const auto& [col, node] : *t) {
      const std::string name = get_string(node, where + ".transforms");
      const auto tr = parse_transform(name);
      if (!tr) throw ConfigError(where + ".transforms: unknown transform '" + name + "'");
      ingest.transforms.emplace_back(std::string(col.str()), *tr);
    }
  }
  if (const auto* n = tbl.get("n_train")) ingest.n_train = get_count(*n, where + ".n_train");
  if (const auto* n = tbl.get("n_test")) ingest.n_test = get_count(*n, where + ".n_test");
  if (const auto* n = tbl.get("split_seed")) {
    ingest.split_seed = static_cast<std::uint64_t>(get_count(*n, where + ".split_seed"));
  }
  if (const auto* n = tbl.get("noise_var")) ingest.noise_var = get_double(*n, where + ".noise_var");
  if (ingest.name.empty()) ingest.name = ingest.path;
  if (ingest.n_train == 0 || ingest.n_test == 0) {
    throw ConfigError(where + " '" + ingest.name + "': n_train and n_test must be set");
  }
  ingest.validate();
  spec.name = ingest.name;
  spec.ingest = std::move(ingest);
  return spec;
}

}  // namespace

std::optional<MethodKind> parse_method(std::string_view label) {
  std::string s = trim_copy(label);
  if (s == "RAFs" || s == "rafs") return RafsMethod{};
  if (s == "DE" || s == "de") return DeepEnsembleMethod{};
  if (s == "AE" || s == "ae") return AnchoredMethod{};
  auto args_of = [&](std::string_view prefix) -> std::optional<std::string> {
    if (s.size() < prefix.size() + 2 || s.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    if (s[prefix.size()] != '(' || s.back() != ')') return std::nullopt;
    return s.substr(prefix.size() + 1, s.size() - prefix.size() - 2);
  };
  if (auto args = args_of("AE")) {
    const auto act = parse_activation(trim_copy(*args));
    if (!act) return std::nullopt;
    return AnchoredMethod{*act};
  }
  if (s == "RP" || s == "rp") return RandomizedPriorMethod{};
  if (auto args = args_of("RP")) {
    RandomizedPriorMethod rp;
    std::stringstream ss(*args);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = trim_copy(part);
      if (part == "nobootstrap") {
        rp.bootstrap = false;
      } else if (part.rfind("beta=", 0) == 0) {
        const std::string v = part.substr(5);
        double beta = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), beta);
        if (ec != std::errc() || ptr != v.data() + v.size() || !(beta >= 0.0)) return std::nullopt;
        rp.beta = beta;
      } else {
        return std::nullopt;
      }
    }
    return rp;
  }
  return std::nullopt;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  auto parse_u64 = [&](std::string_view s) {
    const std::string t = trim_copy(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw ConfigError("bad seed list '" + std::string(text) + "'");
    }
    return v;
  };
  std::stringstream ss{std::string(text)};
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(parse_u64(part));
      continue;
    }
    const std::uint64_t lo = parse_u64(std::string_view(part).substr(0, dash));
    const std::uint64_t hi = parse_u64(std::string_view(part).substr(dash + 1));
    if (hi < lo) throw ConfigError("bad seed range '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config: at least one dataset is required");
  if (methods.empty()) throw ConfigError("config: at least one method is required");
  if (seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (m < 2) throw ConfigError("config: m must be >= 2");
  if (ensemble.af_set.empty()) throw ConfigError("config: af_set is empty");
  for (std::size_t v : m_values) {
    if (v < 2) throw ConfigError("config: ablation m values must be >= 2");
  }
  for (std::size_t k : k_values) {
    if (k < 1 || k > kAllActivations.size()) throw ConfigError("config: ablation k must be in [1, 7]");
  }
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (!names.insert(d.name).second) throw ConfigError("config: duplicate dataset '" + d.name + "'");
  }
  try {
    prior.validate();
    ensemble.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
  check_keys(root,
             {"out_dir", "data_dir", "m", "seeds", "datasets", "methods", "af_set",
              "baseline_activation", "noise_var", "training", "prior", "ablation", "dataset"},
             "config");

  ExperimentConfig cfg;
  if (const auto* n = root.get("out_dir")) cfg.out_dir = get_string(*n, "out_dir");
  if (const auto* n = root.get("data_dir")) cfg.data_dir = get_string(*n, "data_dir");
  if (const auto* n = root.get("m")) cfg.m = get_count(*n, "m");
  if (const auto* n = root.get("seeds")) {
    cfg.seeds.clear();
    for (const auto& item : get_array(*n, "seeds")) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(get_count(item, "seeds")));
    }
  }
  if (const auto* n = root.get("methods")) {
    for (const auto& label : get_strings(*n, "methods")) {
      const auto method = parse_method(label);
      if (!method) throw ConfigError("config: unknown method '" + label + "'");
      cfg.methods.push_back(*method);
    }
  } else {
    cfg.methods = {RafsMethod{}, AnchoredMethod{}, DeepEnsembleMethod{}, RandomizedPriorMethod{}};
  }
  if (const auto* n = root.get("af_set")) {
    cfg.ensemble.af_set.clear();
    for (const auto& name : get_strings(*n, "af_set")) {
      cfg.ensemble.af_set.push_back(get_activation(name, "af_set"));
    }
  }
  if (const auto* n = root.get("baseline_activation")) {
    cfg.ensemble.baseline_activation =
        get_activation(get_string(*n, "baseline_activation"), "baseline_activation");
  }
  if (const auto* n = root.get("noise_var")) cfg.ensemble.noise_var = get_double(*n, "noise_var");

  if (const auto* n = root.get("training")) {
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError("training: expected a table");
    check_keys(*t, {"epochs", "learning_rate", "beta1", "beta2", "epsilon", "hidden", "standardize"},
               "training");
    TrainConfig& tc = cfg.ensemble.train;
    if (const auto* v = t->get("epochs")) tc.epochs = get_count(*v, "training.epochs");
    if (const auto* v = t->get("learning_rate")) tc.adam.step_size = get_double(*v, "training.learning_rate");
    if (const auto* v = t->get("beta1")) tc.adam.beta1 = get_double(*v, "training.beta1");
    if (const auto* v = t->get("beta2")) tc.adam.beta2 = get_double(*v, "training.beta2");
    if (const auto* v = t->get("epsilon")) tc.adam.epsilon = get_double(*v, "training.epsilon");
    if (const auto* v = t->get("hidden")) tc.hidden = get_counts(*v, "training.hidden");
    if (const auto* v = t->get("standardize")) {
      const auto b = v->value<bool>();
      if (!b) throw ConfigError("training.standardize: expected a boolean");
      tc.standardize = *b;
    }
  }
  if (const auto* n = root.get("prior")) {
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError("prior: expected a table");
    check_keys(*t, {"mean", "variance"}, "prior");
    if (const auto* v = t->get("mean")) cfg.prior.mean = get_double(*v, "prior.mean");
    if (const auto* v = t->get("variance")) cfg.prior.variance = get_double(*v, "prior.variance");
  }
  if (const auto* n = root.get("ablation")) {
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError("ablation: expected a table");
    check_keys(*t, {"m_values", "k_values"}, "ablation");
    if (const auto* v = t->get("m_values")) cfg.m_values = get_counts(*v, "ablation.m_values");
    if (const auto* v = t->get("k_values")) cfg.k_values = get_counts(*v, "ablation.k_values");
  }

  if (const auto* n = root.get("datasets")) {
    for (const auto& name : get_strings(*n, "datasets")) {
      cfg.datasets.push_back(resolve_dataset_name(name, cfg.data_dir));
    }
  }
  if (const auto* n = root.get("dataset")) {
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("dataset: expected an array of tables");
    for (const auto& item : *arr) {
      const toml::table* t = item.as_table();
      if (!t) throw ConfigError("dataset: expected an array of tables");
      cfg.datasets.push_back(parse_dataset_table(*t, cfg.data_dir));
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace rafs
