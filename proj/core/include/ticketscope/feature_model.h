#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ticketscope/blob.h"
#include "ticketscope/embedding.h"
#include "ticketscope/lda.h"
#include "ticketscope/lsa.h"
#include "ticketscope/textprep.h"
#include "ticketscope/vocabulary.h"

namespace ticketscope {

enum class FeatureSet { Lda10, Lda500, Lsa, DocVec, Lda10Labeling };

// Wire names: "lda10", "lda500", "lsa", "docvec", "lda10-labeling".
std::string_view to_string(FeatureSet f);
FeatureSet feature_set_from_string(std::string_view s);
// The four document feature sets, in display order.
const std::vector<FeatureSet>& standard_feature_sets();

// Everything needed to fit one feature set.
struct FeatureSpec {
  FeatureSet id = FeatureSet::Lsa;
  textprep::DocPrep prep;
  std::size_t min_count = 1;  // vocabulary cut-off for LDA and LSA
  LdaConfig lda;
  LsaConfig lsa;
  EmbeddingConfig embedding;

  static FeatureSpec defaults(FeatureSet id);
  // Overrides the seed of whichever model the feature set uses.
  FeatureSpec& with_seed(std::uint64_t seed);
  nlohmann::json to_json() const;  // only the fields relevant to `id`
  static FeatureSpec from_json(const nlohmann::json& j);
};

struct FeatureVector {
  std::vector<double> values;
  bool degenerate = false;  // nothing in-vocabulary; excluded from similarity
};

// A fitted vectorizer: tokens in, fixed-length dense vector out. Immutable
// after fitting and safe to share across threads.
class FeatureModel {
 public:
  using Docs = std::vector<std::vector<std::string>>;

  FeatureModel() = default;
  static FeatureModel fit(const FeatureSpec& spec, const Docs& token_docs);

  FeatureSet id() const { return spec_.id; }
  const FeatureSpec& spec() const { return spec_; }
  std::size_t dimension() const;
  const Vocabulary& vocabulary() const;
  std::string vocab_hash() const { return vocabulary().hash(); }

  std::vector<std::string> tokens(std::string_view raw_text,
                                  const textprep::CleanConfig& clean) const {
    return spec_.prep.tokens(raw_text, clean);
  }
  FeatureVector transform(const std::vector<std::string>& tokens) const;

  const LdaModel* lda() const { return std::get_if<LdaModel>(&model_); }
  const LsaModel* lsa() const { return std::get_if<LsaModel>(&model_); }
  const EmbeddingModel* embedding() const { return std::get_if<EmbeddingModel>(&model_); }

  // Writes the model files plus manifest.json. `manifest` supplies corpus
  // hash and timestamp; kind, feature set, hyperparameters and vocab hash are
  // filled in here.
  void save(const std::filesystem::path& dir, ArtifactManifest manifest) const;
  static FeatureModel load(const std::filesystem::path& dir);

 private:
  FeatureSpec spec_;
  Vocabulary vocab_;  // unused for DocVec, which owns its vocabulary
  std::variant<std::monostate, LdaModel, LsaModel, EmbeddingModel> model_;
};

}  // namespace ticketscope
