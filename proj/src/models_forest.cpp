#include <algorithm>
#include <cmath>
#include <numeric>

#include "sentidrop/models.hpp"
#include "sentidrop/models_internal.hpp"
#include "sentidrop/parallel.hpp"
#include "sentidrop/rng.hpp"

namespace sentidrop::models {

namespace {

constexpr double kMinGain = 1e-12;

struct CartBuilder {
  const Matrix& X;
  const std::vector<int>& y;
  const ForestHp& hp;
  int n_candidate_features;
  Rng rng;
  std::vector<TreeNode> nodes;
  std::vector<std::pair<double, int>> scratch;  // (value, label) for split scans

  static double gini(double pos, double n) {
    double p = pos / n;
    return 2.0 * p * (1.0 - p);
  }

  // Candidate features for one split, ascending. Skips the RNG entirely when
  // subsampling is disabled so the degenerate configuration matches a plain
  // CART tree draw-for-draw.
  std::vector<int> candidate_features() {
    int m = static_cast<int>(X.cols);
    std::vector<int> features(static_cast<size_t>(m));
    std::iota(features.begin(), features.end(), 0);
    if (n_candidate_features >= m) return features;
    for (int k = 0; k < n_candidate_features; ++k) {
      int j = k + static_cast<int>(rng.below(static_cast<uint64_t>(m - k)));
      std::swap(features[static_cast<size_t>(k)], features[static_cast<size_t>(j)]);
    }
    features.resize(static_cast<size_t>(n_candidate_features));
    std::sort(features.begin(), features.end());
    return features;
  }

  int build(std::vector<int>& rows, int depth) {
    double n = static_cast<double>(rows.size());
    double pos = 0.0;
    for (int i : rows) pos += y[static_cast<size_t>(i)];

    int node_id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{-1, 0.0, pos / n, -1, -1});

    bool pure = pos == 0.0 || pos == n;
    if (depth >= hp.max_depth || pure || rows.size() < 2 * static_cast<size_t>(hp.min_leaf)) {
      return node_id;
    }

    double parent_impurity = gini(pos, n);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = kMinGain;

    for (int f : candidate_features()) {
      scratch.clear();
      for (int i : rows) {
        scratch.emplace_back(X.at(static_cast<size_t>(i), static_cast<size_t>(f)),
                             y[static_cast<size_t>(i)]);
      }
      std::sort(scratch.begin(), scratch.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double left_pos = 0.0;
      for (size_t k = 1; k < scratch.size(); ++k) {
        left_pos += scratch[k - 1].second;
        double lo = scratch[k - 1].first;
        double hi = scratch[k].first;
        if (!(hi > lo)) continue;
        double nl = static_cast<double>(k);
        double nr = n - nl;
        if (nl < hp.min_leaf || nr < hp.min_leaf) continue;
        double gain =
            parent_impurity - (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / n;
        if (gain > best_gain) {
          double threshold = (lo + hi) / 2.0;
          if (threshold <= lo) threshold = hi;  // midpoint collapsed onto lo
          best_gain = gain;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    for (int i : rows) {
      (X.at(static_cast<size_t>(i), static_cast<size_t>(best_feature)) < best_threshold
           ? left_rows
           : right_rows)
          .push_back(i);
    }
    rows.clear();
    rows.shrink_to_fit();

    int left = build(left_rows, depth + 1);
    int right = build(right_rows, depth + 1);
    nodes[static_cast<size_t>(node_id)] =
        TreeNode{best_feature, best_threshold, 0.0, left, right};
    return node_id;
  }
};

Tree build_tree(const Matrix& X, const std::vector<int>& y, const ForestHp& hp,
                int n_candidate_features, Rng rng) {
  std::vector<int> rows;
  size_t n = X.rows;
  rows.reserve(n);
  if (hp.bootstrap) {
    for (size_t i = 0; i < n; ++i) rows.push_back(static_cast<int>(rng.below(n)));
  } else {
    for (size_t i = 0; i < n; ++i) rows.push_back(static_cast<int>(i));
  }
  CartBuilder builder{X, y, hp, n_candidate_features, rng, {}, {}};
  builder.build(rows, 0);
  return Tree{std::move(builder.nodes)};
}

}  // namespace

TrainedModel train_random_forest(const core::FeatureMatrix& X, const std::vector<int>& y,
                                 const ForestHp& hp) {
  internal::check_training_inputs(X, y);

  int m = static_cast<int>(X.m());
  int k = hp.max_features;
  if (k <= 0) k = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));
  k = std::min(k, m);

  ForestParams params;
  params.trees.resize(static_cast<size_t>(std::max(1, hp.n_trees)));
  Rng root(hp.seed);
  // Per-tree streams derive from (seed, tree index) alone, so serial and
  // parallel construction produce identical forests.
  par::parallel_for(0, params.trees.size(), [&](size_t t) {
    params.trees[t] = build_tree(X.values, y, hp, k, root.child(t));
  });

  TrainedModel model;
  model.family = Family::random_forest;
  model.feature_names = X.column_names;
  model.seed = hp.seed;
  model.training_config = {{"n_trees", hp.n_trees},   {"max_depth", hp.max_depth},
                           {"min_leaf", hp.min_leaf}, {"max_features", hp.max_features},
                           {"bootstrap", hp.bootstrap}, {"seed", hp.seed}};
  model.params = std::move(params);
  return model;
}

}  // namespace sentidrop::models
