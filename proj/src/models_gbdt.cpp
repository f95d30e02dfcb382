#include <algorithm>
#include <cmath>
#include <numeric>

#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"
#include "sentidrop/stats.hpp"

namespace sentidrop::models {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct NodeStats {
  double grad_sum = 0.0;
  double hess_sum = 0.0;
  int depth = 0;
  bool active = false;  // still eligible for splitting this round
  SplitChoice best;
  // scan state, reset per feature
  double left_grad = 0.0;
  double left_hess = 0.0;
  double last_value = 0.0;
  size_t seen = 0;
};

double leaf_weight(double g, double h, double lambda) {
  double denom = std::max(h + lambda, 1e-12);
  return -g / denom;
}

double gain_term(double g, double h, double lambda) {
  double denom = std::max(h + lambda, 1e-12);
  return g * g / denom;
}

double mean_bce(const std::vector<double>& logits, const std::vector<int>& y) {
  double total = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    double z = logits[i];
    double softplus = z > 30.0 ? z : (z < -30.0 ? std::exp(z) : std::log1p(std::exp(z)));
    total += softplus - static_cast<double>(y[i]) * z;
  }
  return total / static_cast<double>(y.size());
}

}  // namespace

TrainedModel train_gbdt(const core::FeatureMatrix& X, const std::vector<int>& y, const GbdtHp& hp,
                        std::vector<double>* round_train_bce) {
  internal::check_training_inputs(X, y);
  const Matrix& V = X.values;
  size_t n = V.rows, m = V.cols;

  double prior = internal::positive_rate(y);
  GbdtParams params;
  params.base_score = std::log(prior / (1.0 - prior));

  // One global argsort per feature; every round reuses it, filtering rows by
  // their current node.
  std::vector<std::vector<int>> sorted_rows(m);
  for (size_t j = 0; j < m; ++j) {
    auto& order = sorted_rows[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double va = V.at(static_cast<size_t>(a), j), vb = V.at(static_cast<size_t>(b), j);
      if (va != vb) return va < vb;
      return a < b;
    });
  }

  std::vector<double> logits(n, params.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<int> node_of_row(n);

  if (round_train_bce) round_train_bce->push_back(mean_bce(logits, y));

  for (int round = 0; round < hp.n_rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      double p = stats::sigmoid(logits[i]);
      grad[i] = p - static_cast<double>(y[i]);
      hess[i] = p * (1.0 - p);
    }

    std::vector<TreeNode> nodes;
    std::vector<NodeStats> stats;
    nodes.push_back(TreeNode{});
    stats.push_back(NodeStats{});
    std::fill(node_of_row.begin(), node_of_row.end(), 0);
    {
      auto& root = stats[0];
      for (size_t i = 0; i < n; ++i) {
        root.grad_sum += grad[i];
        root.hess_sum += hess[i];
      }
      root.active = true;
    }

    for (int depth = 0; depth < hp.max_depth; ++depth) {
      bool any_active = false;
      for (auto& s : stats) {
        if (s.active && s.depth == depth) {
          s.best = SplitChoice{};
          any_active = true;
        }
      }
      if (!any_active) break;

      // Exact greedy scan: one pass over each feature's global ordering
      // evaluates every active node simultaneously. Features ascend and
      // thresholds ascend within a feature, so keeping strictly-better
      // gains yields the lowest-index, smallest-threshold tie-break.
      for (size_t j = 0; j < m; ++j) {
        for (auto& s : stats) {
          if (s.active && s.depth == depth) {
            s.left_grad = 0.0;
            s.left_hess = 0.0;
            s.seen = 0;
          }
        }
        for (int row : sorted_rows[j]) {
          auto i = static_cast<size_t>(row);
          NodeStats& s = stats[static_cast<size_t>(node_of_row[i])];
          if (!s.active || s.depth != depth) continue;
          double v = V.at(i, j);
          if (s.seen > 0 && v > s.last_value) {
            double right_grad = s.grad_sum - s.left_grad;
            double right_hess = s.hess_sum - s.left_hess;
            if (s.left_hess >= hp.min_child_weight && right_hess >= hp.min_child_weight) {
              double gain = 0.5 * (gain_term(s.left_grad, s.left_hess, hp.lambda_l2) +
                                   gain_term(right_grad, right_hess, hp.lambda_l2) -
                                   gain_term(s.grad_sum, s.hess_sum, hp.lambda_l2)) -
                            hp.gamma;
              if (gain > s.best.gain && gain > 0.0) {
                double threshold = (s.last_value + v) / 2.0;
                if (threshold <= s.last_value) threshold = v;
                s.best = SplitChoice{static_cast<int>(j), threshold, gain};
              }
            }
          }
          s.left_grad += grad[i];
          s.left_hess += hess[i];
          s.last_value = v;
          s.seen += 1;
        }
      }

      // Materialize the chosen splits and deal rows to the children.
      size_t level_nodes = stats.size();
      bool any_split = false;
      for (size_t id = 0; id < level_nodes; ++id) {
        if (!stats[id].active || stats[id].depth != depth) continue;
        if (stats[id].best.feature < 0) {
          stats[id].active = false;  // no admissible split; becomes a leaf
          continue;
        }
        any_split = true;
        int left = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        stats.push_back(NodeStats{0.0, 0.0, depth + 1, true, {}, 0, 0, 0, 0});
        int right = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        stats.push_back(NodeStats{0.0, 0.0, depth + 1, true, {}, 0, 0, 0, 0});
        nodes[id] = TreeNode{stats[id].best.feature, stats[id].best.threshold, 0.0, left, right};
        stats[id].active = false;
      }
      if (!any_split) break;

      for (size_t i = 0; i < n; ++i) {
        const TreeNode& nd = nodes[static_cast<size_t>(node_of_row[i])];
        if (nd.is_leaf()) continue;
        int child = V.at(i, static_cast<size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
        node_of_row[i] = child;
        stats[static_cast<size_t>(child)].grad_sum += grad[i];
        stats[static_cast<size_t>(child)].hess_sum += hess[i];
      }
    }

    for (size_t id = 0; id < nodes.size(); ++id) {
      if (nodes[id].is_leaf()) {
        nodes[id].value =
            hp.learning_rate * leaf_weight(stats[id].grad_sum, stats[id].hess_sum, hp.lambda_l2);
      }
    }
    for (size_t i = 0; i < n; ++i) {
      logits[i] += nodes[static_cast<size_t>(node_of_row[i])].value;
    }
    params.trees.push_back(Tree{std::move(nodes)});
    if (round_train_bce) round_train_bce->push_back(mean_bce(logits, y));
  }

  TrainedModel model;
  model.family = Family::gbdt;
  model.feature_names = X.column_names;
  model.seed = hp.seed;
  model.training_config = {{"n_rounds", hp.n_rounds},
                           {"learning_rate", hp.learning_rate},
                           {"max_depth", hp.max_depth},
                           {"lambda_l2", hp.lambda_l2},
                           {"gamma", hp.gamma},
                           {"min_child_weight", hp.min_child_weight},
                           {"seed", hp.seed}};
  model.params = std::move(params);
  return model;
}

}  // namespace sentidrop::models
