#include <cmath>

#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"
#include "sentidrop/stats.hpp"

namespace sentidrop::models {

namespace {

double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

}  // namespace

LogisticObjective logistic_objective(const Matrix& X, const std::vector<int>& y,
                                     const std::vector<double>& weights, double intercept,
                                     double l2_lambda) {
  size_t n = X.rows, m = X.cols;
  LogisticObjective obj;
  obj.grad_weights.assign(m, 0.0);
  double inv_n = 1.0 / static_cast<double>(n);

  for (size_t i = 0; i < n; ++i) {
    auto row = X.row(i);
    double z = intercept;
    for (size_t j = 0; j < m; ++j) z += weights[j] * row[j];
    double yi = static_cast<double>(y[i]);
    obj.loss += (softplus(z) - yi * z) * inv_n;
    double r = (stats::sigmoid(z) - yi) * inv_n;
    obj.grad_intercept += r;
    for (size_t j = 0; j < m; ++j) obj.grad_weights[j] += r * row[j];
  }
  for (size_t j = 0; j < m; ++j) {
    obj.loss += 0.5 * l2_lambda * weights[j] * weights[j];
    obj.grad_weights[j] += l2_lambda * weights[j];
  }
  return obj;
}

namespace internal {

GdFit fit_logistic_gd(const Matrix& X, const std::vector<int>& y, const LogisticHp& hp) {
  GdFit fit;
  fit.weights.assign(X.cols, 0.0);
  double lr = hp.learning_rate;
  LogisticObjective obj = logistic_objective(X, y, fit.weights, fit.intercept, hp.l2_lambda);

  for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
    GdFit proposal = fit;
    for (size_t j = 0; j < X.cols; ++j) proposal.weights[j] -= lr * obj.grad_weights[j];
    proposal.intercept -= lr * obj.grad_intercept;
    LogisticObjective next =
        logistic_objective(X, y, proposal.weights, proposal.intercept, hp.l2_lambda);
    if (next.loss > obj.loss) {
      lr *= 0.5;  // overshoot; retry the same gradient with a smaller step
      if (lr < 1e-12) break;
      continue;
    }
    bool converged = obj.loss - next.loss < hp.tol;
    fit = std::move(proposal);
    obj = std::move(next);
    if (converged) break;
  }
  return fit;
}

}  // namespace internal

TrainedModel train_logistic(const core::FeatureMatrix& X, const std::vector<int>& y,
                            const LogisticHp& hp) {
  internal::check_training_inputs(X, y);
  internal::GdFit fit = internal::fit_logistic_gd(X.values, y, hp);

  TrainedModel model;
  model.family = Family::logistic;
  model.feature_names = X.column_names;
  model.training_config = {{"l2_lambda", hp.l2_lambda},
                           {"learning_rate", hp.learning_rate},
                           {"max_epochs", hp.max_epochs},
                           {"tol", hp.tol}};
  model.params = LogisticParams{std::move(fit.weights), fit.intercept};
  return model;
}

}  // namespace sentidrop::models
