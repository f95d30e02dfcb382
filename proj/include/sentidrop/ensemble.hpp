#pragma once

#include <span>
#include <string>
#include <vector>

#include "sentidrop/core_data.hpp"
#include "sentidrop/models.hpp"
#include "sentidrop/sentiment.hpp"

namespace sentidrop::ens {

// The three-member probability-averaging ensemble. All members are trained
// on identical columns.
struct EnsembleModel {
  models::TrainedModel gbdt;
  models::TrainedModel random_forest;
  models::TrainedModel logistic;

  const std::vector<std::string>& feature_names() const { return gbdt.feature_names; }
};

double average_probs(double p_xg, double p_rf, double p_lr);

enum class Reduction { sum, mean };

// -[y log p + (1-y) log(1-p)] with p clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const int> y, std::span<const double> p, Reduction reduction);

struct EnsemblePrediction {
  std::vector<double> p_gbdt;
  std::vector<double> p_random_forest;
  std::vector<double> p_logistic;
  std::vector<double> p_ensemble;
};

EnsemblePrediction ensemble_predict(const EnsembleModel& model, const core::FeatureMatrix& X);

// Feature-level fusion: dropout-detection columns then sentiment columns,
// joined on student_id. Students absent from the sentiment table get the
// neutral default row; a sentiment row without a matching student is an
// error.
core::FeatureMatrix merge_features(const core::FeatureMatrix& dd,
                                   const std::vector<std::string>& student_ids,
                                   const senti::SentimentFeatureTable& sa);

EnsemblePrediction merge_predict(const core::FeatureMatrix& dd,
                                 const std::vector<std::string>& student_ids,
                                 const senti::SentimentFeatureTable& sa,
                                 const EnsembleModel& model);

void write_predictions_csv(const std::string& path, const std::vector<std::string>& student_ids,
                           const EnsemblePrediction& pred, double threshold);

}  // namespace sentidrop::ens
