#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hmmcr/error.hpp"
#include "hmmcr/model.hpp"

namespace hmmcr {

HierarchicalModel buildDipperModel() {
  MultistateStructure s;
  s.name = "dipper";
  s.stateNames = {"alive"};
  s.observable = {true};
  s.survival = MultistateStructure::Survival::Constant;
  s.transitions = false;
  s.detection = MultistateStructure::Detection::Constant;
  return HierarchicalModel(std::move(s), LikelihoodMode::CjsClosedForm);
}

HierarchicalModel buildOrchidModel() {
  MultistateStructure s;
  s.name = "orchid";
  s.numOccasions = 11;
  s.stateNames = {"vegetative", "flowering", "dormant"};
  s.observable = {true, true, false};
  s.survival = MultistateStructure::Survival::ByOccasion;
  s.transitions = true;
  s.detection = MultistateStructure::Detection::Deterministic;
  return HierarchicalModel(std::move(s));
}

HierarchicalModel buildGooseModel() {
  MultistateStructure s;
  s.name = "goose";
  s.numOccasions = 4;
  s.stateNames = {"site A", "site B", "site C"};
  s.observable = {true, true, true};
  s.survival = MultistateStructure::Survival::ByState;
  s.transitions = true;
  s.detection = MultistateStructure::Detection::ByStateOccasion;
  return HierarchicalModel(std::move(s));
}

HierarchicalModel modelByName(const std::string& name) {
  if (name == "dipper") return buildDipperModel();
  if (name == "orchid") return buildOrchidModel();
  if (name == "goose") return buildGooseModel();
  throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
}

namespace {

using Json = nlohmann::json;

template <typename Enum>
Enum lookup(const Json& doc, const char* key, std::initializer_list<std::pair<const char*, Enum>> table,
            Enum fallback) {
  if (!doc.contains(key)) return fallback;
  const auto value = doc.at(key).get<std::string>();
  for (const auto& [text, e] : table) {
    if (value == text) return e;
  }
  throw Error(ErrorKind::Parse, std::string("model config: unknown ") + key + " '" + value + "'");
}

}  // namespace

HierarchicalModel parseModelConfig(const std::string& jsonText) {
  Json doc;
  try {
    doc = Json::parse(jsonText);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("model config: ") + e.what());
  }
  try {
    MultistateStructure s;
    s.name = doc.value("name", std::string("custom"));
    if (doc.contains("occasions")) s.numOccasions = doc.at("occasions").get<int>();
    s.stateNames = doc.at("states").get<std::vector<std::string>>();
    if (doc.contains("observable")) {
      s.observable = doc.at("observable").get<std::vector<bool>>();
    } else {
      s.observable.assign(s.stateNames.size(), true);
    }
    using Survival = MultistateStructure::Survival;
    using Detection = MultistateStructure::Detection;
    s.survival = lookup<Survival>(doc, "survival",
                                  {{"constant", Survival::Constant},
                                   {"occasion", Survival::ByOccasion},
                                   {"state", Survival::ByState}},
                                  Survival::Constant);
    s.transitions = doc.value("transitions", false);
    s.detection = lookup<Detection>(doc, "detection",
                                    {{"deterministic", Detection::Deterministic},
                                     {"constant", Detection::Constant},
                                     {"state", Detection::ByState},
                                     {"state-occasion", Detection::ByStateOccasion}},
                                    Detection::Constant);
    const auto mode = lookup<LikelihoodMode>(doc, "likelihood",
                                             {{"filter", LikelihoodMode::MatrixFilter},
                                              {"cjs", LikelihoodMode::CjsClosedForm}},
                                             LikelihoodMode::MatrixFilter);
    return HierarchicalModel(std::move(s), mode);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model config: ") + e.what());
  }
}

HierarchicalModel readModelConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open model config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parseModelConfig(text.str());
}

}  // namespace hmmcr
