#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ticketscope/autocat.h"
#include "ticketscope/classify.h"
#include "ticketscope/corpus.h"
#include "ticketscope/feature_model.h"
#include "ticketscope/recommend.h"
#include "ticketscope/textprep.h"

namespace ticketscope {

// Settings shared by every pipeline stage.
struct PipelineConfig {
  textprep::CleanConfig clean;
  std::map<FeatureSet, FeatureSpec> specs;  // missing entries use FeatureSpec::defaults
  std::uint64_t seed = 7;                   // overrides every model seed
  std::size_t min_support = 10;
  ForestConfig forest;
  std::string created_at;  // manifest timestamp; empty = current time

  FeatureSpec spec(FeatureSet fs) const;
  std::string timestamp() const;
};

// Cleaned text of every ticket that has text under the scope.
struct ScopeTexts {
  ContentScope scope = ContentScope::Combined;
  std::vector<std::string> ids;
  std::vector<std::string> clean;
};
ScopeTexts clean_scope(const Corpus& corpus, ContentScope scope, const textprep::CleanConfig& clean);
FeatureModel::Docs scope_tokens(const ScopeTexts& texts, const textprep::DocPrep& prep,
                                const textprep::CleanConfig& clean);

// Vectors of the dataset items, one row per item. Rows of degenerate items
// are whatever the model returns (uniform for LDA, zeros otherwise).
Matrix dataset_vectors(const LabeledDataset& dataset, const FeatureModel& model,
                       const textprep::CleanConfig& clean);

// Directory layout of a model store:
//   models/<scope>/<feature set>/   fitted feature models
//   classifiers/<feature set>/      forests trained on create_only features
//   indexes/<scope>                 symlink to the live index generation
//   eval/<feature set>.json         evaluation reports
//   clusters/                       word clustering report
// Every artifact manifest carries the hash of the corpus it was built from.
class ModelStore {
 public:
  explicit ModelStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path model_dir(ContentScope scope, FeatureSet fs) const;
  std::filesystem::path classifier_dir(FeatureSet fs) const;
  std::filesystem::path index_dir(ContentScope scope) const;
  std::filesystem::path eval_path(FeatureSet fs) const;
  std::filesystem::path clusters_dir() const;

  bool has_model(ContentScope scope, FeatureSet fs) const;
  bool has_classifier(FeatureSet fs) const;
  bool has_index(ContentScope scope) const;
  std::vector<FeatureSet> models(ContentScope scope) const;
  std::vector<FeatureSet> classifiers() const;

  // Loaders check the manifest's corpus hash and throw StoreMismatch when it
  // differs from `corpus_hash`.
  FeatureModel load_model(ContentScope scope, FeatureSet fs, const std::string& corpus_hash) const;
  // Also checks that the classifier was trained on `model`'s vocabulary.
  CategorySuggester load_classifier(FeatureSet fs, const FeatureModel& model,
                                    const std::string& corpus_hash) const;
  // Also checks each vector index against the vocabulary of its model.
  IndexSet load_index(ContentScope scope, const std::map<FeatureSet, const FeatureModel*>& models,
                      const std::string& corpus_hash) const;

  // Writes the index into a fresh generation directory and re-points the
  // scope's symlink with an atomic rename.
  void publish_index(const IndexSet& index, ArtifactManifest manifest) const;

  // Manifests of every artifact, for `describe`.
  nlohmann::json describe() const;

 private:
  std::filesystem::path root_;
};

ArtifactManifest base_manifest(const Corpus& corpus, const PipelineConfig& config);

struct FitRequest {
  std::vector<FeatureSet> feature_sets;
  std::vector<ContentScope> scopes{ContentScope::CreateOnly, ContentScope::Combined};
  bool train_classifiers = true;  // create_only models only; lda10-labeling is skipped
  bool build_indexes = true;      // rebuild every touched scope with all its stored models
};

struct FitSummary {
  std::vector<std::pair<ContentScope, FeatureSet>> fitted;
  std::vector<FeatureSet> classifiers;
  std::vector<ContentScope> indexes;
  nlohmann::json to_json() const;
};

FitSummary fit_store(const ModelStore& store, const Corpus& corpus, const FitRequest& request,
                     const PipelineConfig& config);

// Rebuilds a scope's index from every document feature model stored for it.
IndexSet build_store_index(const ModelStore& store, const Corpus& corpus, ContentScope scope,
                           const PipelineConfig& config);

// Evaluates a stored create_only feature model and writes the report.
EvalReport evaluate_store(const ModelStore& store, const Corpus& corpus, FeatureSet fs,
                          const EvalConfig& eval, const PipelineConfig& config);

// Recommender over a stored scope index and its models.
std::shared_ptr<Recommender> open_recommender(const ModelStore& store,
                                              std::shared_ptr<const Corpus> corpus,
                                              ContentScope scope, const PipelineConfig& config);

struct Classifier {
  std::shared_ptr<const FeatureModel> model;
  std::shared_ptr<const CategorySuggester> suggester;

  // Throws DegenerateQuery when no token of the text is in the vocabulary.
  std::vector<Suggestion> suggest(const std::string& subject, const std::string& create_message,
                                  std::size_t k, const textprep::CleanConfig& clean) const;
};
Classifier open_classifier(const ModelStore& store, const Corpus& corpus, FeatureSet fs);

// Clusters the DocVec word vectors stored for the scope and writes the report.
WordClustering cluster_store_words(const ModelStore& store, const Corpus& corpus, ContentScope scope,
                                   const ClusterParams& params, const PipelineConfig& config);

}  // namespace ticketscope
