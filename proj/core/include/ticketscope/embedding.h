#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ticketscope/matrix.h"
#include "ticketscope/vocabulary.h"

namespace ticketscope {

struct EmbeddingConfig {
  std::size_t dim = 400;
  std::size_t window = 10;
  std::size_t min_count = 5;
  std::size_t negative = 5;
  std::size_t epochs = 20;
  double learning_rate = 0.025;      // decays linearly to min_learning_rate
  double min_learning_rate = 0.0001;
  bool normalize = true;
  std::size_t infer_epochs = 0;      // 0 = same as epochs
  std::uint64_t seed = 7;

  nlohmann::json to_json() const;
  static EmbeddingConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct DocVector {
  std::vector<double> values;
  bool degenerate = false;  // no in-vocabulary tokens; values are all zero
};

// Distributed bag of words (PV-DBOW) document vectors trained jointly with
// skip-gram word vectors, both with negative sampling. Training is
// single-threaded and fully determined by the seed.
class EmbeddingModel {
 public:
  using Docs = std::vector<std::vector<std::string>>;

  EmbeddingModel() = default;
  static EmbeddingModel fit(const Docs& docs, const EmbeddingConfig& config);

  const EmbeddingConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t dimension() const { return config_.dim; }
  const Matrix& word_vectors() const { return words_; }
  const Matrix& output_vectors() const { return outputs_; }
  // Vectors learned for the training documents (not persisted by save()).
  const Matrix& training_doc_vectors() const { return docs_; }
  // Mean negative-sampling loss per training pair, one entry per epoch.
  const std::vector<double>& epoch_losses() const { return losses_; }

  DocVector infer(const std::vector<std::string>& tokens) const;
  // Unit-length vector of an in-vocabulary word; throws NotFound otherwise.
  std::vector<double> word_vector(const std::string& word) const;
  // Top-k words by cosine, query excluded. OOV queries throw NotFound naming
  // the closest spellings.
  std::vector<std::pair<std::string, double>> similar_words(const std::string& word,
                                                            std::size_t k) const;

  void save(const std::filesystem::path& dir) const;
  static EmbeddingModel load(const std::filesystem::path& dir);

 private:
  void build_noise_table();

  EmbeddingConfig config_;
  Vocabulary vocab_;
  Matrix words_;
  Matrix outputs_;
  Matrix docs_;
  std::vector<double> losses_;
  std::vector<double> noise_cdf_;
};

}  // namespace ticketscope
