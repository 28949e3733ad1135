#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "wsii/forest.hpp"

namespace wsii {

inline constexpr int kModelSchemaVersion = 1;

/// Writes the model as self-describing JSON (schema version, hyperparameters,
/// seed, signal context, flat per-tree node arrays).
inline void save_model(const ForestModel& model, std::ostream& out) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["q"] = model.q;
  j["n_trees"] = model.params.n_trees;
  j["max_depth"] = model.params.max_depth;
  j["min_samples_leaf"] = model.params.min_samples_leaf;
  j["features_per_split"] = model.params.features_per_split;
  j["threshold"] = model.params.threshold;
  j["seed"] = model.seed;
  j["single_class"] = model.single_class;
  j["w"] = model.w;
  j["kernel"] = to_string(model.kernel);
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : model.trees) {
    nlohmann::json t;
    auto& feature = t["feature"] = nlohmann::json::array();
    auto& threshold = t["threshold"] = nlohmann::json::array();
    auto& left = t["left"] = nlohmann::json::array();
    auto& right = t["right"] = nlohmann::json::array();
    auto& fraction = t["positive_fraction"] = nlohmann::json::array();
    auto& count = t["sample_count"] = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      fraction.push_back(node.positive_fraction);
      count.push_back(node.sample_count);
    }
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);
  out << j.dump(2) << "\n";
}

inline void save_model(const ForestModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  save_model(model, out);
}

inline ForestModel load_model(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelSchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw ModelSchemaError("model file lacks a schema_version");
  }
  if (j["schema_version"].get<int>() != kModelSchemaVersion) {
    throw ModelSchemaError("unsupported model schema version " +
                           std::to_string(j["schema_version"].get<int>()) + " (expected " +
                           std::to_string(kModelSchemaVersion) + ")");
  }
  try {
    ForestModel model;
    model.q = j.at("q").get<int>();
    model.params.n_trees = j.at("n_trees").get<int>();
    model.params.max_depth = j.at("max_depth").get<int>();
    model.params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    model.params.features_per_split = j.at("features_per_split").get<int>();
    model.params.threshold = j.at("threshold").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.single_class = j.at("single_class").get<bool>();
    model.w = j.at("w").get<int>();
    model.kernel = parse_kernel(j.at("kernel").get<std::string>());
    for (const auto& t : j.at("trees")) {
      Tree tree;
      const auto& feature = t.at("feature");
      const auto& threshold = t.at("threshold");
      const auto& left = t.at("left");
      const auto& right = t.at("right");
      const auto& fraction = t.at("positive_fraction");
      const auto& count = t.at("sample_count");
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n ||
          fraction.size() != n || count.size() != n) {
        throw ModelSchemaError("model tree arrays have inconsistent lengths");
      }
      tree.nodes.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        TreeNode node;
        node.feature = feature[i].get<int>();
        node.threshold = threshold[i].get<double>();
        node.left = left[i].get<int>();
        node.right = right[i].get<int>();
        node.positive_fraction = fraction[i].get<double>();
        node.sample_count = count[i].get<int>();
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != static_cast<std::size_t>(model.params.n_trees)) {
      throw ModelSchemaError("model tree count does not match n_trees");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelSchemaError(std::string("malformed model file: ") + e.what());
  }
}

inline ForestModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace wsii
