#include <cmath>

#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"

namespace sentidrop::models {

TrainedModel train_svm(const core::FeatureMatrix& X, const std::vector<int>& y, const SvmHp& hp) {
  internal::check_training_inputs(X, y);
  const Matrix& V = X.values;
  size_t n = V.rows, m = V.cols;

  SvmParams params;
  params.weights.assign(m, 0.0);

  if (hp.C > 0.0 && hp.epochs > 0) {
    // Deterministic full-batch subgradient descent on
    //   (1/2)||w||^2 + C * sum_i hinge_i,
    // scaled by 1/(nC) so the step size is insensitive to n and C. The
    // reported weights are the tail average of the iterates.
    double reg = 1.0 / (static_cast<double>(n) * hp.C);
    double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> w(m, 0.0), w_avg(m, 0.0);
    double b = 0.0, b_avg = 0.0;
    std::vector<double> grad_w(m);
    int tail_start = hp.epochs / 2;
    int tail_count = 0;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
      for (size_t j = 0; j < m; ++j) grad_w[j] = reg * w[j];
      double grad_b = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double s = y[i] == 1 ? 1.0 : -1.0;
        auto row = V.row(i);
        double margin = b;
        for (size_t j = 0; j < m; ++j) margin += w[j] * row[j];
        if (s * margin < 1.0) {
          for (size_t j = 0; j < m; ++j) grad_w[j] -= s * row[j] * inv_n;
          grad_b -= s * inv_n;
        }
      }
      double step = 0.5 / std::sqrt(static_cast<double>(epoch + 1));
      for (size_t j = 0; j < m; ++j) w[j] -= step * grad_w[j];
      b -= step * grad_b;
      if (epoch >= tail_start) {
        for (size_t j = 0; j < m; ++j) w_avg[j] += w[j];
        b_avg += b;
        ++tail_count;
      }
    }
    for (size_t j = 0; j < m; ++j) params.weights[j] = w_avg[j] / tail_count;
    params.intercept = b_avg / tail_count;
  }

  // Platt-style probability calibration: fit a 1-D logistic model on the
  // training margins with the shared BCE minimizer. With C = 0 the margins
  // are all zero and the calibrated output is the class prior.
  {
    Matrix margins(n, 1);
    for (size_t i = 0; i < n; ++i) {
      double margin = params.intercept;
      auto row = V.row(i);
      for (size_t j = 0; j < m; ++j) margin += params.weights[j] * row[j];
      margins.at(i, 0) = margin;
    }
    LogisticHp calib_hp;
    calib_hp.l2_lambda = 1e-6;
    calib_hp.max_epochs = 500;
    internal::GdFit fit = internal::fit_logistic_gd(margins, y, calib_hp);
    params.calibration_slope = fit.weights[0];
    params.calibration_offset = fit.intercept;
  }

  TrainedModel model;
  model.family = Family::linear_svm;
  model.feature_names = X.column_names;
  model.seed = hp.seed;
  model.training_config = {{"C", hp.C}, {"epochs", hp.epochs}, {"seed", hp.seed}};
  model.params = std::move(params);
  return model;
}

}  // namespace sentidrop::models
