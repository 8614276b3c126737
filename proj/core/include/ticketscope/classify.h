#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ticketscope/blob.h"
#include "ticketscope/corpus.h"
#include "ticketscope/feature_model.h"
#include "ticketscope/matrix.h"
#include "ticketscope/metrics.h"

namespace ticketscope {

struct ForestConfig {
  std::size_t n_trees = 10;
  std::size_t max_depth = 0;           // 0 = unlimited
  std::size_t features_per_split = 0;  // 0 = floor(sqrt(p)), at least 1
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 7;

  nlohmann::json to_json() const;
  static ForestConfig from_json(const nlohmann::json& j);
};

// CART trees (Gini impurity) with bagging. Bootstrap multiplicities are
// Poisson(1) draws seeded by (seed, tree, item id) and candidate splits are
// scanned in (value, item id) order, so the fitted forest does not depend on
// the order of the training items.
class RandomForest {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> proba;  // leaves only
  };
  using Tree = std::vector<Node>;

  RandomForest() = default;
  // X rows align with y and item_ids; y values index [0, n_classes).
  static RandomForest fit(const Matrix& X, std::span<const std::size_t> y, std::size_t n_classes,
                          std::span<const std::string> item_ids, const ForestConfig& config);

  std::vector<double> predict_proba(std::span<const double> x) const;
  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<Tree>& trees() const { return trees_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);
  bool operator==(const RandomForest&) const;

 private:
  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
  std::vector<Tree> trees_;
};

struct Suggestion {
  std::string category;
  double probability = 0.0;
};

class CategorySuggester {
 public:
  CategorySuggester() = default;
  // vectors row i belongs to dataset.items[i].
  static CategorySuggester train(const LabeledDataset& dataset, const Matrix& vectors,
                                 FeatureSet feature_set, const ForestConfig& config);

  // Top-k by probability, ties to the lower label-table index.
  std::vector<Suggestion> suggest(std::span<const double> vector, std::size_t k) const;
  std::vector<double> predict_proba(std::span<const double> vector) const;

  const std::vector<std::string>& label_table() const { return labels_; }
  FeatureSet feature_set() const { return feature_set_; }
  std::size_t dimension() const { return forest_.n_features(); }
  const RandomForest& forest() const { return forest_; }

  void save(const std::filesystem::path& dir, ArtifactManifest manifest) const;
  static CategorySuggester load(const std::filesystem::path& dir);

 private:
  RandomForest forest_;
  std::vector<std::string> labels_;
  FeatureSet feature_set_ = FeatureSet::Lsa;
  ForestConfig config_;
};

struct EvalConfig {
  std::size_t n_trials = 200;
  double test_fraction = 0.2;
  std::size_t k = 3;
  std::uint64_t seed = 7;
  ForestConfig forest;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single trial
};

struct EvalReport {
  std::string feature_set;
  std::size_t n_trials = 0;
  std::size_t n_items = 0;
  std::vector<std::string> label_table;
  std::size_t k = 3;
  Summary weighted_precision;
  Summary weighted_recall;
  Summary weighted_f1;
  Summary accuracy;
  std::vector<Summary> accuracy_at;  // index i holds accuracy@(i+1), i < k
  // Per-class means across trials.
  std::vector<ClassScores> per_class;

  const Summary& accuracy_at_k() const { return accuracy_at.back(); }
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

// Per trial: stratified split, forest training, scoring on the held-out part.
EvalReport evaluate(const LabeledDataset& dataset, const Matrix& vectors, FeatureSet feature_set,
                    const EvalConfig& config);

// One row per feature set: weighted P, R, F1, accuracy, accuracy@k (mean +- std).
std::string format_eval_table(const std::vector<EvalReport>& reports);

// Stratified split of item indices into (train, test). Each class contributes
// round(test_fraction * n) test items, clamped to [1, n - 1].
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::size_t> labels, const std::vector<std::string>& label_table,
    double test_fraction, std::uint64_t seed);

}  // namespace ticketscope
