#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/geo.hpp"
#include "wsii/rng.hpp"
#include "wsii/training.hpp"

namespace wsii {

struct ModelSchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 2;
  int features_per_split = 0;  ///< 0 resolves to ceil(sqrt(q))
  double threshold = 0.5;      ///< decision cutoff, predict = 1 iff proba >= threshold
};

/// Flat tree node; feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double positive_fraction = 0.0;
  int sample_count = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
};

/// Trained ensemble over q-length error windows, plus the signal context it
/// was trained under so inference can be replayed from the model file alone.
struct ForestModel {
  int q = 0;
  ForestParams params;
  std::uint64_t seed = 0;
  bool single_class = false;  ///< degenerate constant model (one class in training data)
  std::vector<Tree> trees;

  // Signal context recorded at training time.
  int w = 7;
  KernelKind kernel = KernelKind::RandomWalk;
};

namespace detail {

inline double gini(std::size_t positives, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double weighted_gini = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<TrainingSample>& samples, int q, const ForestParams& params,
              int mtry, Rng& rng)
      : samples_(samples), q_(q), params_(params), mtry_(mtry), rng_(rng) {}

  Tree build(std::vector<std::size_t> indices) {
    Tree tree;
    grow(tree, std::move(indices), 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<std::size_t> indices, int depth) {
    const std::size_t total = indices.size();
    std::size_t positives = 0;
    for (std::size_t idx : indices) positives += static_cast<std::size_t>(samples_[idx].label);

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[node_id].sample_count = static_cast<int>(total);
    tree.nodes[node_id].positive_fraction =
        static_cast<double>(positives) / static_cast<double>(total);

    const bool pure = positives == 0 || positives == total;
    if (pure || depth >= params_.max_depth ||
        total < 2 * static_cast<std::size_t>(params_.min_samples_leaf)) {
      return node_id;
    }

    const SplitChoice split = best_split(indices, positives);
    if (!split.found) {
      return node_id;
    }
    // A chosen Gini split can never be worse than not splitting.
    if (split.weighted_gini > gini(positives, total) + 1e-12) {
      throw std::logic_error("forest: split increased weighted Gini impurity");
    }

    std::vector<std::size_t> left, right;
    left.reserve(total);
    right.reserve(total);
    for (std::size_t idx : indices) {
      if (samples_[idx].features[static_cast<std::size_t>(split.feature)] <= split.threshold) {
        left.push_back(idx);
      } else {
        right.push_back(idx);
      }
    }
    indices.clear();
    indices.shrink_to_fit();

    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int left_id = grow(tree, std::move(left), depth + 1);
    tree.nodes[node_id].left = left_id;
    const int right_id = grow(tree, std::move(right), depth + 1);
    tree.nodes[node_id].right = right_id;
    return node_id;
  }

  // Lowest weighted Gini over mtry features sampled without replacement;
  // candidate thresholds are midpoints of consecutive distinct values. Ties
  // resolve to the lowest feature index, then the lowest threshold, by
  // scanning candidates in ascending order and accepting strict improvements.
  SplitChoice best_split(const std::vector<std::size_t>& indices, std::size_t positives) {
    SplitChoice best;
    const std::size_t total = indices.size();
    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);

    std::vector<int> features = sample_features();
    std::vector<std::pair<double, int>> values;
    values.reserve(total);
    for (int f : features) {
      values.clear();
      for (std::size_t idx : indices) {
        values.emplace_back(samples_[idx].features[static_cast<std::size_t>(f)],
                            samples_[idx].label);
      }
      std::sort(values.begin(), values.end());

      std::size_t left_count = 0, left_pos = 0;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        ++left_count;
        left_pos += static_cast<std::size_t>(values[i].second);
        if (values[i].first == values[i + 1].first) continue;
        if (left_count < min_leaf || total - left_count < min_leaf) continue;
        const double threshold = values[i].first + (values[i + 1].first - values[i].first) / 2.0;
        const std::size_t right_count = total - left_count;
        const std::size_t right_pos = positives - left_pos;
        const double wg = (static_cast<double>(left_count) * gini(left_pos, left_count) +
                           static_cast<double>(right_count) * gini(right_pos, right_count)) /
                          static_cast<double>(total);
        if (wg < best.weighted_gini) {
          best.found = true;
          best.feature = f;
          best.threshold = threshold;
          best.weighted_gini = wg;
        }
      }
    }
    return best;
  }

  // mtry distinct feature indices in ascending order (partial Fisher-Yates).
  std::vector<int> sample_features() {
    std::vector<int> pool(static_cast<std::size_t>(q_));
    for (int i = 0; i < q_; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < mtry_; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) + rng_.below(static_cast<std::size_t>(q_ - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(mtry_));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  const std::vector<TrainingSample>& samples_;
  int q_;
  const ForestParams& params_;
  int mtry_;
  Rng& rng_;
};

}  // namespace detail

/// Trains n_trees CART trees, each on a class-balanced bootstrap (ceil(N/2)
/// draws with replacement from each class) seeded with seed + tree_index, so
/// the result is independent of any training schedule. Single-class input
/// yields a constant model with a warning on stderr.
inline ForestModel fit(const std::vector<TrainingSample>& samples, const ForestParams& params,
                       std::uint64_t seed) {
  if (samples.empty()) {
    throw std::invalid_argument("fit: empty training set");
  }
  const std::size_t q = samples[0].features.size();
  for (const TrainingSample& s : samples) {
    if (s.features.size() != q) {
      throw std::invalid_argument("fit: inconsistent feature lengths");
    }
    if (s.label != 0 && s.label != 1) {
      throw std::invalid_argument("fit: labels must be 0 or 1");
    }
  }
  if (params.n_trees < 1 || params.max_depth < 1 || params.min_samples_leaf < 1) {
    throw std::invalid_argument("fit: hyperparameters out of range");
  }
  const int mtry = params.features_per_split == 0
                       ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(q))))
                       : params.features_per_split;
  if (mtry < 1 || mtry > static_cast<int>(q)) {
    throw std::invalid_argument("fit: features_per_split must be in [1, q]");
  }

  ForestModel model;
  model.q = static_cast<int>(q);
  model.params = params;
  model.params.features_per_split = mtry;
  model.seed = seed;

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (samples[i].label == 1 ? pos : neg).push_back(i);
  }

  if (pos.empty() || neg.empty()) {
    std::cerr << "warning: training data contains a single class ("
              << (pos.empty() ? "all 0" : "all 1")
              << "); the fitted model is constant" << std::endl;
    model.single_class = true;
    TreeNode leaf;
    leaf.positive_fraction = pos.empty() ? 0.0 : 1.0;
    leaf.sample_count = static_cast<int>(samples.size());
    model.trees.assign(static_cast<std::size_t>(params.n_trees), Tree{{leaf}});
    return model;
  }

  const std::size_t per_class = (samples.size() + 1) / 2;
  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> bag;
    bag.reserve(2 * per_class);
    for (std::size_t i = 0; i < per_class; ++i) bag.push_back(pos[rng.below(pos.size())]);
    for (std::size_t i = 0; i < per_class; ++i) bag.push_back(neg[rng.below(neg.size())]);
    detail::TreeBuilder builder(samples, static_cast<int>(q), model.params, mtry, rng);
    model.trees.push_back(builder.build(std::move(bag)));
  }
  return model;
}

/// Mean of the per-tree leaf positive fractions.
inline double predict_proba(const ForestModel& model, std::span<const double> features) {
  if (static_cast<int>(features.size()) != model.q) {
    throw std::invalid_argument("predict: feature length does not match model q");
  }
  double sum = 0.0;
  for (const Tree& tree : model.trees) {
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
      const TreeNode& tn = tree.nodes[static_cast<std::size_t>(node)];
      node = features[static_cast<std::size_t>(tn.feature)] <= tn.threshold ? tn.left : tn.right;
    }
    sum += tree.nodes[static_cast<std::size_t>(node)].positive_fraction;
  }
  return sum / static_cast<double>(model.trees.size());
}

inline int predict(const ForestModel& model, std::span<const double> features) {
  return predict_proba(model, features) >= model.params.threshold ? 1 : 0;
}

}  // namespace wsii
