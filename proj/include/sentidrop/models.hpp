#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentidrop/core_data.hpp"
#include "sentidrop/matrix.hpp"

namespace sentidrop::models {

enum class Family { logistic, random_forest, gbdt, naive_bayes, linear_svm };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Binary tree stored as an index-linked node array; nodes[0] is the root.
// Internal nodes route rows with value < threshold to the left child.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf payload: positive fraction (forest) or logit step (gbdt)
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> row) const;
};

struct LogisticParams {
  std::vector<double> weights;
  double intercept = 0.0;
};

struct ForestParams {
  std::vector<Tree> trees;  // leaf value = positive fraction; each tree votes by majority
};

struct GbdtParams {
  std::vector<Tree> trees;  // leaf values already scaled by the learning rate
  double base_score = 0.0;  // log-odds of the training prior
};

struct NaiveBayesParams {
  std::array<double, 2> log_prior = {0.0, 0.0};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;  // floored, see var_smoothing
};

struct SvmParams {
  std::vector<double> weights;
  double intercept = 0.0;
  // Platt-style probability mapping: p = sigmoid(slope * margin + offset).
  double calibration_slope = 1.0;
  double calibration_offset = 0.0;
};

struct LogisticHp {
  double l2_lambda = 1e-3;  // applied to weights only, never the intercept
  double learning_rate = 0.5;
  int max_epochs = 500;
  double tol = 1e-10;  // stop when the loss improves by less than this
};

struct ForestHp {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  int max_features = -1;  // -1: floor(sqrt(m)); >= m disables subsampling
  bool bootstrap = true;
  uint64_t seed = 0;
};

struct GbdtHp {
  int n_rounds = 50;
  double learning_rate = 0.1;
  int max_depth = 3;
  double lambda_l2 = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  uint64_t seed = 0;
};

struct NaiveBayesHp {
  double var_smoothing = 1e-9;  // variance floor = this x max total feature variance
};

struct SvmHp {
  double C = 1.0;
  int epochs = 300;
  uint64_t seed = 0;
};

struct TrainedModel {
  Family family = Family::logistic;
  std::vector<std::string> feature_names;
  uint64_t seed = 0;
  nlohmann::json training_config;  // hyper-parameter snapshot
  std::variant<LogisticParams, ForestParams, GbdtParams, NaiveBayesParams, SvmParams> params;
};

TrainedModel train_logistic(const core::FeatureMatrix& X, const std::vector<int>& y,
                            const LogisticHp& hp);
TrainedModel train_random_forest(const core::FeatureMatrix& X, const std::vector<int>& y,
                                 const ForestHp& hp);
TrainedModel train_gbdt(const core::FeatureMatrix& X, const std::vector<int>& y, const GbdtHp& hp,
                        std::vector<double>* round_train_bce = nullptr);
TrainedModel train_naive_bayes(const core::FeatureMatrix& X, const std::vector<int>& y,
                               const NaiveBayesHp& hp);
TrainedModel train_svm(const core::FeatureMatrix& X, const std::vector<int>& y, const SvmHp& hp);

// Probability of class 1 per row. Column names must match the model's
// training columns exactly, order included.
std::vector<double> predict_proba(const TrainedModel& model, const core::FeatureMatrix& X);

// Versioned JSON: loading an unknown format_version or family is an error.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// L2-regularized binary cross-entropy objective, exposed so the analytic
// gradient can be checked against finite differences.
struct LogisticObjective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_intercept = 0.0;
};
LogisticObjective logistic_objective(const Matrix& X, const std::vector<int>& y,
                                     const std::vector<double>& weights, double intercept,
                                     double l2_lambda);

}  // namespace sentidrop::models
