#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "ticketscope/corpus.h"
#include "ticketscope/feature_model.h"
#include "ticketscope/pipeline.h"
#include "ticketscope/recommend.h"
#include "ticketscope/synthetic.h"

namespace ticketscope::testing {

std::filesystem::path golden_dir();
std::filesystem::path schema_dir();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::shared_ptr<const Corpus> synthetic_corpus(const SyntheticSpec& spec);

// Feature-set presets shrunk so a few hundred tickets fit in well under a second.
FeatureSpec quick_spec(FeatureSet fs);

// A corpus with fitted models, a scope index and a recommender over them.
struct World {
  std::shared_ptr<const Corpus> corpus;
  std::map<FeatureSet, std::shared_ptr<const FeatureModel>> models;
  std::shared_ptr<const IndexSet> index;
  std::shared_ptr<Recommender> recommender;
};
World build_world(std::shared_ptr<const Corpus> corpus, ContentScope scope,
                  const std::vector<FeatureSet>& sets = standard_feature_sets());

// Pipeline settings using quick_spec for every feature set and a fixed timestamp.
PipelineConfig quick_config();

// Fits all five feature sets on both scopes, trains classifiers, builds the
// indexes and clusters the combined word vectors into `root`.
void build_store(const std::filesystem::path& root, const Corpus& corpus, const PipelineConfig& config);

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace ticketscope::testing
