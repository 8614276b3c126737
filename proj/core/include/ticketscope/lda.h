#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ticketscope/matrix.h"

namespace ticketscope {

struct LdaConfig {
  std::size_t n_topics = 10;
  double alpha = 10.0;   // per-topic Dirichlet concentration on doc-topic
  double beta = 0.005;   // per-word Dirichlet concentration on topic-word
  std::size_t iterations = 1000;
  std::size_t infer_iterations = 100;
  std::size_t infer_burn_in = 50;
  std::uint64_t seed = 7;

  // "lda10-features", "lda10-labeling", "lda500".
  static LdaConfig preset(std::string_view name);
  nlohmann::json to_json() const;
  static LdaConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct TopicInference {
  std::vector<double> proportions;  // sums to 1
  bool degenerate = false;          // no in-vocabulary tokens; proportions uniform
};

// Token ids per document, as produced by Vocabulary::encode.
using EncodedDocs = std::vector<std::vector<std::uint32_t>>;

class LdaModel {
 public:
  LdaModel() = default;

  // Collapsed Gibbs sampling with the SparseLDA bucket decomposition.
  static LdaModel fit(const EncodedDocs& docs, std::size_t vocab_size, const LdaConfig& config);

  const LdaConfig& config() const { return config_; }
  std::size_t n_topics() const { return config_.n_topics; }
  std::size_t vocab_size() const { return vocab_size_; }
  // K x V, rows sum to 1, (n_kw + beta) / (n_k + V beta).
  const Matrix& phi() const { return phi_; }
  // Final topic-word count table, K x V.
  const std::vector<std::uint32_t>& topic_word_counts() const { return counts_; }
  // Final topic of every training token, per document.
  const EncodedDocs& training_assignments() const { return assignments_; }

  // Held-out Gibbs with phi frozen. Seeded by the model seed and the document
  // content, so identical documents get identical vectors.
  TopicInference infer(const std::vector<std::uint32_t>& doc) const;

  void save(const std::filesystem::path& dir) const;
  static LdaModel load(const std::filesystem::path& dir);

 private:
  void build_inference_tables();

  LdaConfig config_;
  std::size_t vocab_size_ = 0;
  Matrix phi_;
  std::vector<std::uint32_t> counts_;
  EncodedDocs assignments_;
  Matrix word_cdf_;                // V x K cumulative phi[.][w]
  std::vector<double> word_mass_;  // sum_k phi[k][w]
};

namespace lda_detail {

// The full conditional p(z = k | rest) for one token after `sweeps` sweeps,
// computed directly and from the sampler's incrementally maintained buckets.
struct ConditionalPair {
  std::vector<double> dense;
  std::vector<double> sparse;
};
ConditionalPair conditional_for_token(const EncodedDocs& docs, std::size_t vocab_size,
                                      const LdaConfig& config, std::size_t sweeps,
                                      std::size_t doc, std::size_t position);

}  // namespace lda_detail

}  // namespace ticketscope
