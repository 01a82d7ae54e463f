#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rafs/ensemble.hpp"
#include "rafs/errors.hpp"

namespace rafs {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

json method_to_json(const MethodKind& method) {
  if (std::holds_alternative<RafsMethod>(method)) return {{"kind", "RAFs"}};
  if (const auto* ae = std::get_if<AnchoredMethod>(&method)) {
    return {{"kind", "AE"}, {"activation", std::string(to_string(ae->activation))}};
  }
  if (std::holds_alternative<DeepEnsembleMethod>(method)) return {{"kind", "DE"}};
  const auto& rp = std::get<RandomizedPriorMethod>(method);
  return {{"kind", "RPParam"}, {"beta", rp.beta}, {"bootstrap", rp.bootstrap}};
}

ActivationKind activation_from_json(const json& j) {
  const auto name = j.get<std::string>();
  const auto act = parse_activation(name);
  if (!act) throw DataError("model file: unknown activation '" + name + "'");
  return *act;
}

MethodKind method_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "RAFs") return RafsMethod{};
  if (kind == "AE") return AnchoredMethod{activation_from_json(j.at("activation"))};
  if (kind == "DE") return DeepEnsembleMethod{};
  if (kind == "RPParam") {
    return RandomizedPriorMethod{j.at("beta").get<double>(), j.at("bootstrap").get<bool>()};
  }
  throw DataError("model file: unknown method kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const EnsembleModel& model) {
  if (model.members.empty()) throw DomainError("model_to_json: empty model");
  const Architecture& arch = model.members.front().net.architecture();
  json doc;
  doc["format"] = "rafs-ensemble";
  doc["version"] = kModelFormatVersion;
  doc["method"] = method_to_json(model.method);
  doc["m"] = model.size();
  doc["architecture"] = {{"input_dim", arch.input_dim},
                         {"hidden", arch.hidden},
                         {"output_dim", arch.output_dim}};
  json acts = json::array();
  for (ActivationKind a : model.activations) acts.push_back(std::string(to_string(a)));
  doc["activations"] = acts;
  doc["noise_var"] = model.noise_var;
  doc["standardizer"] = {{"x_mean", model.standardizer.x_mean},
                         {"x_scale", model.standardizer.x_scale},
                         {"y_mean", model.standardizer.y_mean},
                         {"y_scale", model.standardizer.y_scale}};
  json members = json::array();
  for (const auto& member : model.members) {
    json entry;
    entry["params"] = member.net.flatten();
    if (member.anchor) entry["anchor"] = member.anchor->flatten();
    if (member.prior_net) entry["prior"] = member.prior_net->flatten();
    members.push_back(std::move(entry));
  }
  doc["members"] = std::move(members);
  return doc.dump();
}

EnsembleModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  if (doc.value("format", "") != "rafs-ensemble") throw DataError("model file: unknown format");
  if (doc.value("version", 0) != kModelFormatVersion) {
    throw DataError("model file: unsupported version " + std::to_string(doc.value("version", 0)));
  }
  try {
    EnsembleModel model;
    model.method = method_from_json(doc.at("method"));
    Architecture arch;
    arch.input_dim = doc.at("architecture").at("input_dim").get<std::size_t>();
    arch.hidden = doc.at("architecture").at("hidden").get<std::vector<std::size_t>>();
    arch.output_dim = doc.at("architecture").at("output_dim").get<std::size_t>();
    for (const auto& a : doc.at("activations")) model.activations.push_back(activation_from_json(a));
    model.noise_var = doc.at("noise_var").get<double>();
    const json& st = doc.at("standardizer");
    model.standardizer.x_mean = st.at("x_mean").get<std::vector<double>>();
    model.standardizer.x_scale = st.at("x_scale").get<std::vector<double>>();
    model.standardizer.y_mean = st.at("y_mean").get<double>();
    model.standardizer.y_scale = st.at("y_scale").get<double>();

    const json& members = doc.at("members");
    if (members.size() != model.activations.size() || members.size() != doc.at("m").get<std::size_t>()) {
      throw DataError("model file: member count disagrees with m/activations");
    }
    Architecture single = arch;
    single.output_dim = 1;
    for (std::size_t j = 0; j < members.size(); ++j) {
      const json& entry = members[j];
      const ActivationKind act = model.activations[j];
      EnsembleMember member;
      member.net = MlpParams(arch, act, entry.at("params").get<std::vector<double>>());
      if (entry.contains("anchor")) {
        member.anchor = MlpParams(arch, act, entry.at("anchor").get<std::vector<double>>());
      }
      if (entry.contains("prior")) {
        member.prior_net = MlpParams(single, act, entry.at("prior").get<std::vector<double>>());
      }
      model.members.push_back(std::move(member));
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_model(const EnsembleModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << model_to_json(model) << '\n';
}

EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace rafs
