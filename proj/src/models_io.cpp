#include <fstream>

#include "sentidrop/error.hpp"
#include "sentidrop/models.hpp"

namespace sentidrop::models {

namespace {
constexpr int kFormatVersion = 1;

nlohmann::json tree_to_json(const Tree& t) {
  // Node: [feature, threshold, value, left, right]; feature -1 marks a leaf.
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : t.nodes) {
    nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
  }
  return nodes;
}

Tree tree_from_json(const nlohmann::json& j) {
  Tree t;
  for (const auto& n : j) {
    t.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<double>(),
                               n.at(3).get<int>(), n.at(4).get<int>()});
  }
  return t;
}

nlohmann::json trees_to_json(const std::vector<Tree>& trees) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Tree& t : trees) arr.push_back(tree_to_json(t));
  return arr;
}

std::vector<Tree> trees_from_json(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j) trees.push_back(tree_from_json(t));
  return trees;
}
}  // namespace

nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json params;
  if (const auto* p = std::get_if<LogisticParams>(&model.params)) {
    params = {{"weights", p->weights}, {"intercept", p->intercept}};
  } else if (const auto* p = std::get_if<ForestParams>(&model.params)) {
    params = {{"trees", trees_to_json(p->trees)}};
  } else if (const auto* p = std::get_if<GbdtParams>(&model.params)) {
    params = {{"trees", trees_to_json(p->trees)}, {"base_score", p->base_score}};
  } else if (const auto* p = std::get_if<NaiveBayesParams>(&model.params)) {
    params = {{"log_prior", p->log_prior},
              {"mean", p->mean},
              {"variance", p->variance}};
  } else if (const auto* p = std::get_if<SvmParams>(&model.params)) {
    params = {{"weights", p->weights},
              {"intercept", p->intercept},
              {"calibration_slope", p->calibration_slope},
              {"calibration_offset", p->calibration_offset}};
  }
  return {{"format_version", kFormatVersion},
          {"family", to_string(model.family)},
          {"feature_names", model.feature_names},
          {"seed", model.seed},
          {"training_config", model.training_config},
          {"parameters", params}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || !j.at("format_version").is_number_integer() ||
      j.at("format_version").get<int>() != kFormatVersion) {
    throw Error("UnknownModelVersion", "models",
                "unsupported model format version (expected " + std::to_string(kFormatVersion) +
                    ")");
  }
  TrainedModel model;
  model.family = family_from_string(j.at("family").get<std::string>());
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.seed = j.at("seed").get<uint64_t>();
  model.training_config = j.at("training_config");
  const auto& params = j.at("parameters");

  switch (model.family) {
    case Family::logistic:
      model.params = LogisticParams{params.at("weights").get<std::vector<double>>(),
                                    params.at("intercept").get<double>()};
      break;
    case Family::random_forest:
      model.params = ForestParams{trees_from_json(params.at("trees"))};
      break;
    case Family::gbdt:
      model.params =
          GbdtParams{trees_from_json(params.at("trees")), params.at("base_score").get<double>()};
      break;
    case Family::naive_bayes: {
      NaiveBayesParams p;
      p.log_prior = params.at("log_prior").get<std::array<double, 2>>();
      p.mean = params.at("mean").get<std::array<std::vector<double>, 2>>();
      p.variance = params.at("variance").get<std::array<std::vector<double>, 2>>();
      model.params = std::move(p);
      break;
    }
    case Family::linear_svm:
      model.params = SvmParams{params.at("weights").get<std::vector<double>>(),
                               params.at("intercept").get<double>(),
                               params.at("calibration_slope").get<double>(),
                               params.at("calibration_offset").get<double>()};
      break;
  }
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("IoError", "models", "cannot write file: " + path);
  }
  out << model_to_json(model).dump(2) << '\n';
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("IoError", "models", "cannot open file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedJson", "models", "cannot parse model file: " + std::string(e.what()));
  }
  return model_from_json(j);
}

}  // namespace sentidrop::models
