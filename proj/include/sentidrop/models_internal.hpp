#pragma once

#include <functional>
#include <vector>

#include "sentidrop/core_data.hpp"
#include "sentidrop/models.hpp"

namespace sentidrop::models::internal {

void check_training_inputs(const core::FeatureMatrix& X, const std::vector<int>& y);
double positive_rate(const std::vector<int>& y);

// Plain gradient descent with step halving on non-improvement; shared by
// train_logistic and the SVM probability calibration.
struct GdFit {
  std::vector<double> weights;
  double intercept = 0.0;
};
GdFit fit_logistic_gd(const Matrix& X, const std::vector<int>& y, const LogisticHp& hp);

}  // namespace sentidrop::models::internal
