#include "ticketscope/classify.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

nlohmann::json ForestConfig::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth},
          {"features_per_split", features_per_split},
          {"min_samples_leaf", min_samples_leaf},
          {"bootstrap", bootstrap},
          {"seed", seed}};
}

ForestConfig ForestConfig::from_json(const nlohmann::json& j) {
  ForestConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_trees") c.n_trees = value.get<std::size_t>();
    else if (key == "max_depth") c.max_depth = value.get<std::size_t>();
    else if (key == "features_per_split") c.features_per_split = value.get<std::size_t>();
    else if (key == "min_samples_leaf") c.min_samples_leaf = value.get<std::size_t>();
    else if (key == "bootstrap") c.bootstrap = value.get<bool>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw InvalidInput("unknown forest option '" + key + "'");
  }
  return c;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const std::size_t> y, std::size_t n_classes,
              const std::vector<double>& weight, const std::vector<std::size_t>& id_rank,
              const ForestConfig& config, std::uint64_t seed)
      : X_(X), y_(y), n_classes_(n_classes), weight_(weight), id_rank_(id_rank), config_(config),
        rng_(seed) {
    const std::size_t p = X.cols;
    mtry_ = config.features_per_split
                ? std::min(config.features_per_split, p)
                : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));
    min_leaf_ = std::max<std::size_t>(1, config.min_samples_leaf);
  }

  RandomForest::Tree build(std::vector<std::size_t> items) {
    std::sort(items.begin(), items.end(),
              [&](std::size_t a, std::size_t b) { return id_rank_[a] < id_rank_[b]; });
    grow(items, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child impurity, lower is better
  };

  std::int32_t grow(std::vector<std::size_t>& items, std::size_t depth) {
    std::vector<double> cw(n_classes_, 0.0);
    double total = 0.0;
    for (std::size_t i : items) {
      cw[y_[i]] += weight_[i];
      total += weight_[i];
    }
    const auto node = static_cast<std::int32_t>(tree_.size());
    tree_.emplace_back();
    const bool pure = std::count_if(cw.begin(), cw.end(), [](double w) { return w > 0; }) <= 1;
    const bool depth_cap = config_.max_depth && depth >= config_.max_depth;
    Split split;
    if (!pure && !depth_cap && items.size() >= 2 * min_leaf_) split = find_split(items);
    if (!split.found) {
      for (double& w : cw) w /= total;
      tree_[static_cast<std::size_t>(node)].proba = std::move(cw);
      return node;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i : items)
      (X_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    items.clear();
    items.shrink_to_fit();
    const std::int32_t l = grow(left, depth + 1);
    const std::int32_t r = grow(right, depth + 1);
    auto& n = tree_[static_cast<std::size_t>(node)];
    n.feature = static_cast<std::int32_t>(split.feature);
    n.threshold = split.threshold;
    n.left = l;
    n.right = r;
    return node;
  }

  // Draws features without replacement until mtry of them admitted a valid
  // split (or all were tried).
  Split find_split(const std::vector<std::size_t>& items) {
    const std::size_t p = X_.cols;
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), 0);
    Split best;
    std::size_t usable = 0;
    std::vector<std::size_t> order(items);
    std::vector<double> left(n_classes_), right(n_classes_);
    for (std::size_t j = 0; j < p && usable < mtry_; ++j) {
      std::swap(features[j], features[j + rng_.below(p - j)]);
      const std::size_t f = features[j];
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = X_(a, f), xb = X_(b, f);
        return xa != xb ? xa < xb : id_rank_[a] < id_rank_[b];
      });
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      double wl = 0.0, wr = 0.0;
      for (std::size_t i : order) {
        right[y_[i]] += weight_[i];
        wr += weight_[i];
      }
      bool any = false;
      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const std::size_t i = order[pos];
        left[y_[i]] += weight_[i];
        right[y_[i]] -= weight_[i];
        wl += weight_[i];
        wr -= weight_[i];
        const double x0 = X_(i, f), x1 = X_(order[pos + 1], f);
        if (!(x0 < x1)) continue;
        if (pos + 1 < min_leaf_ || order.size() - pos - 1 < min_leaf_) continue;
        any = true;
        double sl = 0.0, sr = 0.0;
        for (std::size_t c = 0; c < n_classes_; ++c) {
          sl += left[c] * left[c];
          sr += right[c] * right[c];
        }
        // wl * gini(left) + wr * gini(right)
        const double impurity = (wl - sl / wl) + (wr - sr / wr);
        if (!best.found || impurity < best.impurity - 1e-12) {
          double t = x0 + (x1 - x0) / 2.0;
          if (!(t < x1)) t = x0;
          best = {true, f, t, impurity};
        }
      }
      if (any) ++usable;
    }
    return best;
  }

  const Matrix& X_;
  std::span<const std::size_t> y_;
  std::size_t n_classes_;
  const std::vector<double>& weight_;
  const std::vector<std::size_t>& id_rank_;
  const ForestConfig& config_;
  Rng rng_;
  std::size_t mtry_ = 1;
  std::size_t min_leaf_ = 1;
  RandomForest::Tree tree_;
};

}  // namespace

RandomForest RandomForest::fit(const Matrix& X, std::span<const std::size_t> y,
                               std::size_t n_classes, std::span<const std::string> item_ids,
                               const ForestConfig& config) {
  if (config.n_trees == 0) throw InvalidInput("forest needs at least one tree");
  if (X.rows != y.size() || X.rows != item_ids.size())
    throw InvalidInput("training matrix, labels and ids differ in length");
  if (X.rows == 0 || X.cols == 0) throw InvalidInput("empty training matrix");
  for (std::size_t label : y)
    if (label >= n_classes) throw InvalidInput("label index out of range");

  std::vector<std::size_t> by_id(X.rows);
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return item_ids[a] < item_ids[b]; });
  std::vector<std::size_t> id_rank(X.rows);
  for (std::size_t r = 0; r < by_id.size(); ++r) id_rank[by_id[r]] = r;

  RandomForest forest;
  forest.n_classes_ = n_classes;
  forest.n_features_ = X.cols;
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    const std::uint64_t tree_seed = mix_seed(config.seed, t);
    std::vector<double> weight(X.rows, 1.0);
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < X.rows; ++i) {
      if (config.bootstrap) {
        Rng draw(mix_seed(tree_seed, fnv1a(item_ids[i])));
        weight[i] = draw.poisson(1.0);
      }
      if (weight[i] > 0) items.push_back(i);
    }
    if (items.empty()) {
      // Degenerate bootstrap on tiny inputs: fall back to the full sample.
      std::fill(weight.begin(), weight.end(), 1.0);
      items.resize(X.rows);
      std::iota(items.begin(), items.end(), 0);
    }
    TreeBuilder builder(X, y, n_classes, weight, id_rank, config, mix_seed(tree_seed, 0x7472));
    forest.trees_.push_back(builder.build(std::move(items)));
  }
  return forest;
}

std::vector<double> RandomForest::predict_proba(std::span<const double> x) const {
  if (x.size() != n_features_)
    throw InvalidInput("vector has dimension " + std::to_string(x.size()) + ", model expects " +
                       std::to_string(n_features_));
  std::vector<double> out(n_classes_, 0.0);
  for (const Tree& tree : trees_) {
    std::size_t n = 0;
    while (tree[n].feature >= 0)
      n = static_cast<std::size_t>(x[static_cast<std::size_t>(tree[n].feature)] <= tree[n].threshold
                                       ? tree[n].left
                                       : tree[n].right);
    for (std::size_t c = 0; c < n_classes_; ++c) out[c] += tree[n].proba[c];
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& p : out) p /= total;
  return out;
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& n : tree) {
      if (n.feature < 0)
        nodes.push_back({{"proba", n.proba}});
      else
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                         {"right", n.right}});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"n_classes", n_classes_}, {"n_features", n_features_}, {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  RandomForest f;
  f.n_classes_ = j.at("n_classes").get<std::size_t>();
  f.n_features_ = j.at("n_features").get<std::size_t>();
  for (const auto& nodes : j.at("trees")) {
    Tree tree;
    for (const auto& n : nodes) {
      Node node;
      if (n.contains("proba")) {
        node.proba = n.at("proba").get<std::vector<double>>();
        if (node.proba.size() != f.n_classes_) throw Error("forest leaf has wrong class count");
      } else {
        node.feature = n.at("feature").get<std::int32_t>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::int32_t>();
        node.right = n.at("right").get<std::int32_t>();
      }
      tree.push_back(std::move(node));
    }
    const auto size = static_cast<std::int32_t>(tree.size());
    for (const Node& n : tree)
      if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size ||
                             static_cast<std::size_t>(n.feature) >= f.n_features_))
        throw Error("forest tree has an invalid node reference");
    f.trees_.push_back(std::move(tree));
  }
  return f;
}

bool RandomForest::operator==(const RandomForest& o) const {
  if (n_classes_ != o.n_classes_ || n_features_ != o.n_features_ || trees_.size() != o.trees_.size())
    return false;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    if (trees_[t].size() != o.trees_[t].size()) return false;
    for (std::size_t i = 0; i < trees_[t].size(); ++i) {
      const Node& a = trees_[t][i];
      const Node& b = o.trees_[t][i];
      if (a.feature != b.feature || a.threshold != b.threshold || a.left != b.left ||
          a.right != b.right || a.proba != b.proba)
        return false;
    }
  }
  return true;
}

namespace {

void check_vectors(const LabeledDataset& dataset, const Matrix& vectors) {
  if (vectors.rows != dataset.items.size())
    throw InvalidInput("got " + std::to_string(vectors.rows) + " vectors for " +
                       std::to_string(dataset.items.size()) + " dataset items");
  for (std::size_t i = 0; i < vectors.rows; ++i)
    for (double v : vectors.row(i))
      if (!std::isfinite(v))
        throw InvalidInput("non-finite feature value for ticket " + dataset.items[i].ticket_id);
}

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }
Summary summary_from(const nlohmann::json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>()};
}

}  // namespace

CategorySuggester CategorySuggester::train(const LabeledDataset& dataset, const Matrix& vectors,
                                           FeatureSet feature_set, const ForestConfig& config) {
  check_vectors(dataset, vectors);
  const auto y = dataset.label_indices();
  std::vector<std::size_t> present(y);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  if (present.size() < 2)
    throw InvalidInput("classifier needs at least 2 classes, dataset has " +
                       std::to_string(present.size()));
  std::vector<std::string> ids;
  for (const auto& item : dataset.items) ids.push_back(item.ticket_id);

  CategorySuggester s;
  s.forest_ = RandomForest::fit(vectors, y, dataset.label_table.size(), ids, config);
  s.labels_ = dataset.label_table;
  s.feature_set_ = feature_set;
  s.config_ = config;
  return s;
}

std::vector<double> CategorySuggester::predict_proba(std::span<const double> vector) const {
  return forest_.predict_proba(vector);
}

std::vector<Suggestion> CategorySuggester::suggest(std::span<const double> vector,
                                                   std::size_t k) const {
  const auto proba = predict_proba(vector);
  const auto order = rank_labels(proba);
  std::vector<Suggestion> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
    out.push_back({labels_[order[i]], proba[order[i]]});
  return out;
}

void CategorySuggester::save(const std::filesystem::path& dir, ArtifactManifest manifest) const {
  std::filesystem::create_directories(dir);
  manifest.kind = "classifier";
  manifest.feature_set = std::string(to_string(feature_set_));
  manifest.hyperparameters = config_.to_json();
  manifest.seed = config_.seed;
  write_json_file(dir / "classifier.json",
                  {{"label_table", labels_}, {"forest", forest_.to_json()}});
  write_manifest(dir, manifest);
}

CategorySuggester CategorySuggester::load(const std::filesystem::path& dir) {
  const ArtifactManifest manifest = read_manifest(dir);
  if (manifest.kind != "classifier")
    throw Error(dir.string() + " holds a '" + manifest.kind + "' artifact, not a classifier");
  CategorySuggester s;
  try {
    s.feature_set_ = feature_set_from_string(manifest.feature_set);
    s.config_ = ForestConfig::from_json(manifest.hyperparameters);
    const auto j = read_json_file(dir / "classifier.json");
    s.labels_ = j.at("label_table").get<std::vector<std::string>>();
    s.forest_ = RandomForest::from_json(j.at("forest"));
  } catch (...) {
    std::throw_with_nested(Error("cannot load classifier from " + dir.string()));
  }
  if (s.labels_.size() != s.forest_.n_classes())
    throw Error("classifier label table does not match its forest");
  return s;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::size_t> labels, const std::vector<std::string>& label_table,
    double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidInput("test_fraction must lie strictly between 0 and 1");
  std::vector<std::vector<std::size_t>> by_class(label_table.size());
  for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);
  std::vector<std::string> too_small;
  for (std::size_t c = 0; c < by_class.size(); ++c)
    if (!by_class[c].empty() && by_class[c].size() < 2) too_small.push_back(label_table[c]);
  if (!too_small.empty())
    throw InvalidInput("classes with fewer than 2 items cannot be stratified: " +
                       join(too_small, ", "));
  Rng rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    const double n = static_cast<double>(members.size());
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

EvalReport evaluate(const LabeledDataset& dataset, const Matrix& vectors, FeatureSet feature_set,
                    const EvalConfig& config) {
  if (config.n_trials == 0) throw InvalidInput("evaluation needs at least one trial");
  if (config.k == 0) throw InvalidInput("accuracy@k needs k >= 1");
  check_vectors(dataset, vectors);
  const auto y = dataset.label_indices();
  const std::size_t L = dataset.label_table.size();
  if (L < 2) throw InvalidInput("evaluation needs at least 2 classes");
  std::vector<std::string> ids;
  for (const auto& item : dataset.items) ids.push_back(item.ticket_id);

  std::vector<double> prec, rec, f1, acc;
  std::vector<std::vector<double>> at(config.k);
  std::vector<ClassScores> per_class(L);
  for (std::size_t trial = 0; trial < config.n_trials; ++trial) {
    const auto [train, test] =
        stratified_split(y, dataset.label_table, config.test_fraction, mix_seed(config.seed, trial));
    std::vector<std::size_t> y_train, y_test;
    std::vector<std::string> id_train;
    for (std::size_t i : train) {
      y_train.push_back(y[i]);
      id_train.push_back(ids[i]);
    }
    for (std::size_t i : test) y_test.push_back(y[i]);
    ForestConfig fc = config.forest;
    fc.seed = mix_seed(config.forest.seed, trial);
    const RandomForest forest = RandomForest::fit(select_rows(vectors, train), y_train, L, id_train, fc);

    Matrix proba(test.size(), L);
    std::vector<std::size_t> y_pred;
    for (std::size_t r = 0; r < test.size(); ++r) {
      const auto p = forest.predict_proba(vectors.row(test[r]));
      std::copy(p.begin(), p.end(), proba.row(r).begin());
      y_pred.push_back(rank_labels(p).front());
    }
    const Scores s = score_predictions(y_test, y_pred, dataset.label_table);
    prec.push_back(s.weighted_precision);
    rec.push_back(s.weighted_recall);
    f1.push_back(s.weighted_f1);
    acc.push_back(s.accuracy);
    for (std::size_t k = 1; k <= config.k; ++k) at[k - 1].push_back(accuracy_at_k(proba, y_test, k));
    for (std::size_t c = 0; c < L; ++c) {
      per_class[c].precision += s.per_class[c].precision;
      per_class[c].recall += s.per_class[c].recall;
      per_class[c].f1 += s.per_class[c].f1;
    }
  }

  EvalReport r;
  r.feature_set = std::string(to_string(feature_set));
  r.n_trials = config.n_trials;
  r.n_items = dataset.items.size();
  r.label_table = dataset.label_table;
  r.k = config.k;
  r.weighted_precision = summarize(prec);
  r.weighted_recall = summarize(rec);
  r.weighted_f1 = summarize(f1);
  r.accuracy = summarize(acc);
  for (const auto& v : at) r.accuracy_at.push_back(summarize(v));
  const double n = static_cast<double>(config.n_trials);
  for (std::size_t c = 0; c < L; ++c) {
    per_class[c].label = dataset.label_table[c];
    per_class[c].precision /= n;
    per_class[c].recall /= n;
    per_class[c].f1 /= n;
    per_class[c].support = static_cast<std::size_t>(std::count(y.begin(), y.end(), c));
  }
  r.per_class = std::move(per_class);
  return r;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : per_class)
    classes.push_back({{"label", c.label},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support}});
  nlohmann::json at = nlohmann::json::array();
  for (const auto& s : accuracy_at) at.push_back(summary_json(s));
  return {{"feature_set", feature_set},
          {"n_trials", n_trials},
          {"n_items", n_items},
          {"label_table", label_table},
          {"k", k},
          {"weighted_precision", summary_json(weighted_precision)},
          {"weighted_recall", summary_json(weighted_recall)},
          {"weighted_f1", summary_json(weighted_f1)},
          {"accuracy", summary_json(accuracy)},
          {"accuracy_at", at},
          {"per_class", classes}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.feature_set = j.at("feature_set").get<std::string>();
  r.n_trials = j.at("n_trials").get<std::size_t>();
  r.n_items = j.at("n_items").get<std::size_t>();
  r.label_table = j.at("label_table").get<std::vector<std::string>>();
  r.k = j.at("k").get<std::size_t>();
  r.weighted_precision = summary_from(j.at("weighted_precision"));
  r.weighted_recall = summary_from(j.at("weighted_recall"));
  r.weighted_f1 = summary_from(j.at("weighted_f1"));
  r.accuracy = summary_from(j.at("accuracy"));
  for (const auto& s : j.at("accuracy_at")) r.accuracy_at.push_back(summary_from(s));
  for (const auto& c : j.at("per_class"))
    r.per_class.push_back({c.at("label").get<std::string>(), c.at("precision").get<double>(),
                           c.at("recall").get<double>(), c.at("f1").get<double>(),
                           c.at("support").get<std::size_t>()});
  return r;
}

std::string format_eval_table(const std::vector<EvalReport>& reports) {
  auto cell = [](const Summary& s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f +- %.3f", s.mean, s.std);
    return std::string(buf);
  };
  std::string k = reports.empty() ? "3" : std::to_string(reports.front().k);
  char line[256];
  std::snprintf(line, sizeof line, "%-15s %-16s %-16s %-16s %-16s %-16s\n", "feature_set",
                "precision", "recall", "f1", "accuracy", ("accuracy@" + k).c_str());
  std::string out = line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-15s %-16s %-16s %-16s %-16s %-16s\n", r.feature_set.c_str(),
                  cell(r.weighted_precision).c_str(), cell(r.weighted_recall).c_str(),
                  cell(r.weighted_f1).c_str(), cell(r.accuracy).c_str(),
                  cell(r.accuracy_at_k()).c_str());
    out += line;
  }
  return out;
}

}  // namespace ticketscope
