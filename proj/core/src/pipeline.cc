#include "ticketscope/pipeline.h"

#include <algorithm>
#include <chrono>

#include "ticketscope/blob.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

namespace fs = std::filesystem;

FeatureSpec PipelineConfig::spec(FeatureSet id) const {
  auto it = specs.find(id);
  FeatureSpec s = it == specs.end() ? FeatureSpec::defaults(id) : it->second;
  return s.with_seed(seed);
}

std::string PipelineConfig::timestamp() const {
  if (!created_at.empty()) return created_at;
  return format_utc_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

ScopeTexts clean_scope(const Corpus& corpus, ContentScope scope, const textprep::CleanConfig& clean) {
  ScopeTexts out;
  out.scope = scope;
  for (const Ticket& t : corpus.tickets()) {
    auto text = scope_text(t, scope);
    if (!text) continue;
    out.ids.push_back(t.id);
    out.clean.push_back(textprep::clean(*text, clean));
  }
  return out;
}

FeatureModel::Docs scope_tokens(const ScopeTexts& texts, const textprep::DocPrep& prep,
                                const textprep::CleanConfig& clean) {
  FeatureModel::Docs docs;
  docs.reserve(texts.clean.size());
  for (const auto& c : texts.clean) docs.push_back(prep.tokens_from_clean(c, clean));
  return docs;
}

Matrix dataset_vectors(const LabeledDataset& dataset, const FeatureModel& model,
                       const textprep::CleanConfig& clean) {
  Matrix m{dataset.items.size(), model.dimension(), {}};
  m.data.assign(m.rows * m.cols, 0.0);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const FeatureVector v = model.transform(model.tokens(dataset.items[i].doc_text, clean));
    std::copy(v.values.begin(), v.values.end(), m.row(i).begin());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Store

ModelStore::ModelStore(fs::path root) : root_(std::move(root)) {}

fs::path ModelStore::model_dir(ContentScope scope, FeatureSet f) const {
  return root_ / "models" / std::string(to_string(scope)) / std::string(to_string(f));
}
fs::path ModelStore::classifier_dir(FeatureSet f) const {
  return root_ / "classifiers" / std::string(to_string(f));
}
fs::path ModelStore::index_dir(ContentScope scope) const {
  return root_ / "indexes" / std::string(to_string(scope));
}
fs::path ModelStore::eval_path(FeatureSet f) const {
  return root_ / "eval" / (std::string(to_string(f)) + ".json");
}
fs::path ModelStore::clusters_dir() const { return root_ / "clusters"; }

bool ModelStore::has_model(ContentScope scope, FeatureSet f) const {
  return fs::exists(model_dir(scope, f) / "manifest.json");
}
bool ModelStore::has_classifier(FeatureSet f) const {
  return fs::exists(classifier_dir(f) / "manifest.json");
}
bool ModelStore::has_index(ContentScope scope) const {
  return fs::exists(index_dir(scope) / "manifest.json");
}

namespace {

const std::vector<FeatureSet>& all_feature_sets() {
  static const std::vector<FeatureSet> all{FeatureSet::Lda10, FeatureSet::Lda500, FeatureSet::Lsa,
                                           FeatureSet::DocVec, FeatureSet::Lda10Labeling};
  return all;
}

void check_corpus(const ArtifactManifest& m, const fs::path& dir, const std::string& corpus_hash) {
  if (m.corpus_hash != corpus_hash)
    throw StoreMismatch(dir.string() + " was built from corpus " + m.corpus_hash +
                        " but the loaded corpus hashes to " + corpus_hash);
}

}  // namespace

std::vector<FeatureSet> ModelStore::models(ContentScope scope) const {
  std::vector<FeatureSet> out;
  for (FeatureSet f : all_feature_sets())
    if (has_model(scope, f)) out.push_back(f);
  return out;
}

std::vector<FeatureSet> ModelStore::classifiers() const {
  std::vector<FeatureSet> out;
  for (FeatureSet f : all_feature_sets())
    if (has_classifier(f)) out.push_back(f);
  return out;
}

FeatureModel ModelStore::load_model(ContentScope scope, FeatureSet f, const std::string& corpus_hash) const {
  const fs::path dir = model_dir(scope, f);
  if (!has_model(scope, f))
    throw NotFound("no " + std::string(to_string(f)) + " model for scope " +
                   std::string(to_string(scope)) + " in " + root_.string());
  check_corpus(read_manifest(dir), dir, corpus_hash);
  return FeatureModel::load(dir);
}

CategorySuggester ModelStore::load_classifier(FeatureSet f, const FeatureModel& model,
                                              const std::string& corpus_hash) const {
  const fs::path dir = classifier_dir(f);
  if (!has_classifier(f)) throw NotFound("no " + std::string(to_string(f)) + " classifier in " + root_.string());
  const ArtifactManifest m = read_manifest(dir);
  check_corpus(m, dir, corpus_hash);
  if (m.vocab_hash != model.vocab_hash())
    throw StoreMismatch(dir.string() + " was trained on vocabulary " + m.vocab_hash +
                        " but the stored model has " + model.vocab_hash());
  return CategorySuggester::load(dir);
}

IndexSet ModelStore::load_index(ContentScope scope, const std::map<FeatureSet, const FeatureModel*>& models,
                                const std::string& corpus_hash) const {
  const fs::path dir = index_dir(scope);
  if (!has_index(scope)) throw NotFound("no index for scope " + std::string(to_string(scope)) + " in " + root_.string());
  const ArtifactManifest m = read_manifest(dir);
  check_corpus(m, dir, corpus_hash);
  IndexSet set = IndexSet::load(dir);
  const auto hashes = m.extra.value("vocab_hashes", nlohmann::json::object());
  for (const auto& [f, _] : set.vectors) {
    const std::string name(to_string(f));
    auto it = models.find(f);
    if (it == models.end() || it->second == nullptr)
      throw StoreMismatch(dir.string() + " has a " + name + " index but no matching model was loaded");
    if (hashes.value(name, std::string()) != it->second->vocab_hash())
      throw StoreMismatch(dir.string() + ": " + name + " index was built with a different model vocabulary");
  }
  return set;
}

void ModelStore::publish_index(const IndexSet& index, ArtifactManifest manifest) const {
  const fs::path parent = root_ / "indexes";
  fs::create_directories(parent);
  const std::string scope(to_string(index.scope));
  const std::string prefix = scope + ".g";
  std::size_t generation = 0;
  std::vector<fs::path> old;
  for (const auto& entry : fs::directory_iterator(parent)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with(prefix) || entry.is_symlink()) continue;
    old.push_back(entry.path());
    try {
      generation = std::max<std::size_t>(generation, std::stoul(name.substr(prefix.size())));
    } catch (const std::exception&) {
    }
  }
  const std::string target = prefix + std::to_string(generation + 1);
  index.save(parent / target, std::move(manifest));
  const fs::path tmp = parent / ("." + scope + ".link");
  fs::remove(tmp);
  fs::create_directory_symlink(target, tmp);
  fs::rename(tmp, index_dir(index.scope));
  for (const auto& p : old) fs::remove_all(p);
}

nlohmann::json ModelStore::describe() const {
  nlohmann::json out = nlohmann::json::object();
  if (!fs::exists(root_)) throw NotFound("store " + root_.string() + " does not exist");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::recursive_directory_iterator(root_))
    if (entry.path().filename() == "manifest.json") manifests.push_back(entry.path());
  std::sort(manifests.begin(), manifests.end());
  for (const auto& p : manifests)
    out[fs::relative(p.parent_path(), root_).generic_string()] = read_manifest(p.parent_path()).to_json();
  return out;
}

ArtifactManifest base_manifest(const Corpus& corpus, const PipelineConfig& config) {
  ArtifactManifest m;
  m.corpus_hash = corpus.content_hash();
  m.created_at = config.timestamp();
  m.seed = config.seed;
  return m;
}

// ---------------------------------------------------------------------------
// Stages

nlohmann::json FitSummary::to_json() const {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [scope, f] : fitted)
    models.push_back({{"scope", std::string(to_string(scope))}, {"feature_set", std::string(to_string(f))}});
  nlohmann::json cls = nlohmann::json::array();
  for (FeatureSet f : classifiers) cls.push_back(std::string(to_string(f)));
  nlohmann::json idx = nlohmann::json::array();
  for (ContentScope s : indexes) idx.push_back(std::string(to_string(s)));
  return {{"models", models}, {"classifiers", cls}, {"indexes", idx}};
}

FitSummary fit_store(const ModelStore& store, const Corpus& corpus, const FitRequest& request,
                     const PipelineConfig& config) {
  if (request.feature_sets.empty()) throw InvalidInput("no feature sets requested");
  FitSummary summary;
  const ArtifactManifest manifest = base_manifest(corpus, config);
  std::optional<LabeledDataset> dataset;
  for (ContentScope scope : request.scopes) {
    const ScopeTexts texts = clean_scope(corpus, scope, config.clean);
    if (texts.ids.empty()) throw InvalidInput("no tickets have " + std::string(to_string(scope)) + " text");
    for (FeatureSet f : request.feature_sets) {
      const FeatureSpec spec = config.spec(f);
      FeatureModel model;
      try {
        model = FeatureModel::fit(spec, scope_tokens(texts, spec.prep, config.clean));
      } catch (...) {
        std::throw_with_nested(Error("fitting " + std::string(to_string(f)) + " on " +
                                     std::string(to_string(scope)) + " text failed"));
      }
      model.save(store.model_dir(scope, f), manifest);
      summary.fitted.emplace_back(scope, f);
      if (!request.train_classifiers || scope != ContentScope::CreateOnly || f == FeatureSet::Lda10Labeling)
        continue;
      if (!dataset) dataset = build_labeled_dataset(corpus, config.min_support);
      ForestConfig forest = config.forest;
      forest.seed = config.seed;
      const auto suggester = CategorySuggester::train(*dataset, dataset_vectors(*dataset, model, config.clean), f, forest);
      ArtifactManifest cm = manifest;
      cm.vocab_hash = model.vocab_hash();
      suggester.save(store.classifier_dir(f), cm);
      summary.classifiers.push_back(f);
    }
    if (request.build_indexes) {
      const IndexSet index = build_store_index(store, corpus, scope, config);
      if (!index.vectors.empty()) summary.indexes.push_back(scope);
    }
  }
  return summary;
}

IndexSet build_store_index(const ModelStore& store, const Corpus& corpus, ContentScope scope,
                           const PipelineConfig& config) {
  const std::string hash = corpus.content_hash();
  std::vector<FeatureModel> models;
  for (FeatureSet f : standard_feature_sets())
    if (store.has_model(scope, f)) models.push_back(store.load_model(scope, f, hash));
  if (models.empty()) {
    warn("no document feature models stored for scope " + std::string(to_string(scope)) + "; index not built");
    return {};
  }
  std::vector<const FeatureModel*> ptrs;
  ArtifactManifest manifest = base_manifest(corpus, config);
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& m : models) {
    ptrs.push_back(&m);
    hashes[std::string(to_string(m.id()))] = m.vocab_hash();
  }
  manifest.extra["vocab_hashes"] = hashes;
  IndexOptions options;
  options.clean = config.clean;
  IndexSet index = build_index(corpus, scope, ptrs, options);
  store.publish_index(index, manifest);
  return index;
}

EvalReport evaluate_store(const ModelStore& store, const Corpus& corpus, FeatureSet f,
                          const EvalConfig& eval, const PipelineConfig& config) {
  const FeatureModel model = store.load_model(ContentScope::CreateOnly, f, corpus.content_hash());
  const LabeledDataset dataset = build_labeled_dataset(corpus, config.min_support);
  EvalReport report = evaluate(dataset, dataset_vectors(dataset, model, config.clean), f, eval);
  fs::create_directories(store.eval_path(f).parent_path());
  write_json_file(store.eval_path(f), report.to_json());
  return report;
}

std::shared_ptr<Recommender> open_recommender(const ModelStore& store, std::shared_ptr<const Corpus> corpus,
                                              ContentScope scope, const PipelineConfig& config) {
  const std::string hash = corpus->content_hash();
  if (!store.has_index(scope))
    throw NotFound("no index for scope " + std::string(to_string(scope)) + " in " + store.root().string() +
                   "; run fit first");
  const ArtifactManifest m = read_manifest(store.index_dir(scope));
  std::map<FeatureSet, std::shared_ptr<const FeatureModel>> models;
  std::map<FeatureSet, const FeatureModel*> raw;
  for (const auto& name : m.hyperparameters.at("feature_sets")) {
    const FeatureSet f = feature_set_from_string(name.get<std::string>());
    auto model = std::make_shared<const FeatureModel>(store.load_model(scope, f, hash));
    raw[f] = model.get();
    models[f] = std::move(model);
  }
  auto index = std::make_shared<const IndexSet>(store.load_index(scope, raw, hash));
  IndexOptions options;
  options.clean = config.clean;
  return std::make_shared<Recommender>(std::move(corpus), std::move(index), std::move(models), options);
}

std::vector<Suggestion> Classifier::suggest(const std::string& subject, const std::string& create_message,
                                            std::size_t k, const textprep::CleanConfig& clean) const {
  const FeatureVector v = model->transform(model->tokens(subject + " " + create_message, clean));
  if (v.degenerate)
    throw DegenerateQuery("no word of the message is in the " + std::string(to_string(model->id())) +
                          " vocabulary");
  return suggester->suggest(v.values, k);
}

Classifier open_classifier(const ModelStore& store, const Corpus& corpus, FeatureSet f) {
  const std::string hash = corpus.content_hash();
  auto model = std::make_shared<const FeatureModel>(store.load_model(ContentScope::CreateOnly, f, hash));
  auto suggester = std::make_shared<const CategorySuggester>(store.load_classifier(f, *model, hash));
  return {std::move(model), std::move(suggester)};
}

WordClustering cluster_store_words(const ModelStore& store, const Corpus& corpus, ContentScope scope,
                                   const ClusterParams& params, const PipelineConfig& config) {
  const FeatureModel model = store.load_model(scope, FeatureSet::DocVec, corpus.content_hash());
  WordClustering clustering = cluster_words(*model.embedding(), params);
  ArtifactManifest manifest = base_manifest(corpus, config);
  manifest.kind = "clusters";
  manifest.feature_set = std::string(to_string(FeatureSet::DocVec));
  manifest.vocab_hash = model.vocab_hash();
  manifest.seed = params.seed;
  manifest.hyperparameters = {{"scope", std::string(to_string(scope))},
                              {"algorithm", std::string(to_string(params.algorithm))},
                              {"distance", std::string(to_string(params.distance))},
                              {"k", params.k},
                              {"eps", params.eps},
                              {"min_pts", params.min_pts},
                              {"strategy", std::string(to_string(params.strategy))},
                              {"n_representatives", params.n_representatives},
                              {"alpha", params.alpha},
                              {"max_iterations", params.max_iterations}};
  fs::create_directories(store.clusters_dir());
  write_json_file(store.clusters_dir() / "clusters.json", clustering.to_json());
  write_manifest(store.clusters_dir(), manifest);
  return clustering;
}

}  // namespace ticketscope
