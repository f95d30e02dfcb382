#include <algorithm>
#include <cmath>

#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"

namespace sentidrop::models {

TrainedModel train_naive_bayes(const core::FeatureMatrix& X, const std::vector<int>& y,
                               const NaiveBayesHp& hp) {
  internal::check_training_inputs(X, y);
  const Matrix& V = X.values;
  size_t n = V.rows, m = V.cols;

  NaiveBayesParams params;
  std::array<double, 2> count = {0.0, 0.0};
  for (int label : y) count[static_cast<size_t>(label)] += 1.0;
  for (size_t c = 0; c < 2; ++c) {
    params.log_prior[c] = std::log(count[c] / static_cast<double>(n));
    params.mean[c].assign(m, 0.0);
    params.variance[c].assign(m, 0.0);
  }

  for (size_t i = 0; i < n; ++i) {
    auto c = static_cast<size_t>(y[i]);
    for (size_t j = 0; j < m; ++j) params.mean[c][j] += V.at(i, j);
  }
  for (size_t c = 0; c < 2; ++c) {
    for (size_t j = 0; j < m; ++j) params.mean[c][j] /= count[c];
  }
  for (size_t i = 0; i < n; ++i) {
    auto c = static_cast<size_t>(y[i]);
    for (size_t j = 0; j < m; ++j) {
      double d = V.at(i, j) - params.mean[c][j];
      params.variance[c][j] += d * d;
    }
  }

  // Variance floor: var_smoothing times the largest total feature variance,
  // with a tiny absolute fallback when every feature is constant.
  double max_total_var = 0.0;
  for (size_t j = 0; j < m; ++j) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += V.at(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = V.at(i, j) - mean;
      ss += d * d;
    }
    max_total_var = std::max(max_total_var, ss / static_cast<double>(n));
  }
  double floor = std::max(hp.var_smoothing * max_total_var, 1e-12);
  for (size_t c = 0; c < 2; ++c) {
    for (size_t j = 0; j < m; ++j) {
      params.variance[c][j] = std::max(params.variance[c][j] / count[c], floor);
    }
  }

  TrainedModel model;
  model.family = Family::naive_bayes;
  model.feature_names = X.column_names;
  model.training_config = {{"var_smoothing", hp.var_smoothing}};
  model.params = std::move(params);
  return model;
}

}  // namespace sentidrop::models
