#include <algorithm>
#include <cmath>
#include <sstream>

#include "sentidrop/error.hpp"
#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"
#include "sentidrop/parallel.hpp"
#include "sentidrop/stats.hpp"

namespace sentidrop::models {

std::string to_string(Family f) {
  switch (f) {
    case Family::logistic: return "logistic";
    case Family::random_forest: return "random_forest";
    case Family::gbdt: return "gbdt";
    case Family::naive_bayes: return "naive_bayes";
    case Family::linear_svm: return "linear_svm";
  }
  return "logistic";
}

Family family_from_string(const std::string& s) {
  if (s == "logistic") return Family::logistic;
  if (s == "random_forest") return Family::random_forest;
  if (s == "gbdt") return Family::gbdt;
  if (s == "naive_bayes") return Family::naive_bayes;
  if (s == "linear_svm") return Family::linear_svm;
  throw Error("UnknownFamily", "models", "unknown model family '" + s + "'");
}

double Tree::predict(std::span<const double> row) const {
  int node = 0;
  while (!nodes[static_cast<size_t>(node)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<size_t>(node)];
    node = row[static_cast<size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<size_t>(node)].value;
}

namespace internal {

void check_training_inputs(const core::FeatureMatrix& X, const std::vector<int>& y) {
  if (X.n() == 0 || X.m() == 0) {
    throw Error("EmptyDataset", "models", "training requires n >= 1 and m >= 1");
  }
  if (X.n() != y.size()) {
    throw Error("LengthMismatch", "models", "label count does not match row count");
  }
  if (X.any_missing()) {
    throw Error("NotImputed", "models", "training requires a fully imputed matrix");
  }
  bool has0 = false, has1 = false;
  for (int label : y) {
    if (label == 0) {
      has0 = true;
    } else if (label == 1) {
      has1 = true;
    } else {
      throw Error("BadLabel", "models", "labels must be 0 or 1");
    }
  }
  if (!has0 || !has1) {
    throw Error("SingleClassTraining", "models", "training data contains a single class");
  }
}

double positive_rate(const std::vector<int>& y) {
  double sum = 0.0;
  for (int label : y) sum += label;
  return sum / static_cast<double>(y.size());
}

}  // namespace internal

namespace {

std::vector<double> predict_rows(size_t n, const std::function<double(size_t)>& row_fn) {
  std::vector<double> out(n);
  if (n >= 4096) {
    par::parallel_for(0, n, [&](size_t i) { out[i] = row_fn(i); });
  } else {
    for (size_t i = 0; i < n; ++i) out[i] = row_fn(i);
  }
  return out;
}

}  // namespace

std::vector<double> predict_proba(const TrainedModel& model, const core::FeatureMatrix& X) {
  if (X.column_names != model.feature_names) {
    std::ostringstream msg;
    msg << "feature columns do not match the model (expected " << model.feature_names.size()
        << " columns";
    for (size_t j = 0; j < model.feature_names.size() && j < X.column_names.size(); ++j) {
      if (model.feature_names[j] != X.column_names[j]) {
        msg << "; first mismatch at " << j << ": expected '" << model.feature_names[j]
            << "', got '" << X.column_names[j] << "'";
        break;
      }
    }
    msg << ")";
    throw Error("FeatureMismatch", "models", msg.str());
  }
  if (X.any_missing()) {
    throw Error("NotImputed", "models", "prediction requires a fully imputed matrix");
  }

  const Matrix& V = X.values;
  if (const auto* p = std::get_if<LogisticParams>(&model.params)) {
    return predict_rows(V.rows, [&](size_t i) {
      double z = p->intercept;
      auto row = V.row(i);
      for (size_t j = 0; j < V.cols; ++j) z += p->weights[j] * row[j];
      return stats::sigmoid(z);
    });
  }
  if (const auto* p = std::get_if<ForestParams>(&model.params)) {
    double n_trees = static_cast<double>(p->trees.size());
    return predict_rows(V.rows, [&](size_t i) {
      auto row = V.row(i);
      double votes = 0.0;
      for (const Tree& t : p->trees) votes += t.predict(row) >= 0.5 ? 1.0 : 0.0;
      return votes / n_trees;
    });
  }
  if (const auto* p = std::get_if<GbdtParams>(&model.params)) {
    return predict_rows(V.rows, [&](size_t i) {
      auto row = V.row(i);
      double f = p->base_score;
      for (const Tree& t : p->trees) f += t.predict(row);
      return stats::sigmoid(f);
    });
  }
  if (const auto* p = std::get_if<NaiveBayesParams>(&model.params)) {
    return predict_rows(V.rows, [&](size_t i) {
      auto row = V.row(i);
      // Two-class log-likelihood ratio; sigmoid of it is the normalized
      // posterior, so the implied class pair sums to 1 exactly.
      double s = p->log_prior[1] - p->log_prior[0];
      for (size_t j = 0; j < V.cols; ++j) {
        double d1 = row[j] - p->mean[1][j];
        double d0 = row[j] - p->mean[0][j];
        s += -0.5 * std::log(p->variance[1][j]) - d1 * d1 / (2.0 * p->variance[1][j]);
        s -= -0.5 * std::log(p->variance[0][j]) - d0 * d0 / (2.0 * p->variance[0][j]);
      }
      return stats::sigmoid(s);
    });
  }
  const auto& p = std::get<SvmParams>(model.params);
  return predict_rows(V.rows, [&](size_t i) {
    double margin = p.intercept;
    auto row = V.row(i);
    for (size_t j = 0; j < V.cols; ++j) margin += p.weights[j] * row[j];
    return stats::sigmoid(p.calibration_slope * margin + p.calibration_offset);
  });
}

}  // namespace sentidrop::models
