#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ticketscope/blob.h"
#include "ticketscope/corpus.h"
#include "ticketscope/feature_model.h"
#include "ticketscope/matrix.h"
#include "ticketscope/textprep.h"

namespace ticketscope {

// Metadata restriction for similarity queries. Unset fields match everything.
struct QueryFilter {
  std::optional<Timestamp> date_from;  // inclusive
  std::optional<Timestamp> date_to;    // inclusive
  std::optional<std::string> owner;
  std::optional<std::string> requestor;
  std::set<std::string> categories;    // ticket must carry at least one

  bool empty() const;
  bool matches(const Ticket& t) const;
  nlohmann::json to_json() const;
  // Dates accept "YYYY-MM-DD" or a full timestamp; a bare date_to covers the
  // whole day.
  static QueryFilter from_json(const nlohmann::json& j);
};

struct SimilarHit {
  std::string ticket_id;
  double score = 0.0;
  std::string feature_set;  // "lda10", ..., "naive", "mlt"
  std::string snippet;

  nlohmann::json to_json() const;
};

// Either an indexed ticket or free text.
struct Query {
  std::optional<std::string> ticket_id;
  std::optional<std::string> text;

  static Query ticket(std::string id) { return {std::move(id), std::nullopt}; }
  static Query free_text(std::string t) { return {std::nullopt, std::move(t)}; }
};

// L2-normalized document vectors of one feature set.
class VectorIndex {
 public:
  VectorIndex() = default;
  // Degenerate or zero vectors are left out and listed in excluded().
  static VectorIndex build(const FeatureModel& model, const std::vector<std::string>& ids,
                           const std::vector<std::vector<std::string>>& token_docs);

  FeatureSet feature_set() const { return feature_set_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& vectors() const { return vectors_; }
  const std::vector<std::string>& excluded() const { return excluded_; }
  std::optional<std::size_t> row_of(std::string_view id) const;

  void save(const std::filesystem::path& dir) const;
  static VectorIndex load(const std::filesystem::path& dir);

 private:
  void reindex();

  FeatureSet feature_set_ = FeatureSet::Lsa;
  std::vector<std::string> ids_;
  Matrix vectors_;
  std::vector<std::string> excluded_;
  std::map<std::string, std::size_t, std::less<>> row_;
};

// Inverted index with term frequencies for BM25 and word-overlap queries.
class LexicalIndex {
 public:
  static constexpr double kK1 = 1.2;
  static constexpr double kB = 0.75;

  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  LexicalIndex() = default;
  static LexicalIndex build(const std::vector<std::string>& ids,
                            const std::vector<std::vector<std::string>>& token_docs);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> doc_of(std::string_view id) const;
  // Sorted (term, tf) pairs of one document.
  const std::vector<std::pair<std::string, std::uint32_t>>& doc_terms(std::size_t doc) const {
    return forward_[doc];
  }
  std::size_t doc_length(std::size_t doc) const { return lengths_[doc]; }
  double average_length() const { return avg_length_; }
  std::size_t df(std::string_view term) const;
  const std::vector<Posting>* postings(std::string_view term) const;

  // ln(1 + (N - df + 0.5) / (df + 0.5))
  double idf(std::string_view term) const;
  // The query's max_terms highest tf * idf terms, ties by term.
  std::vector<std::string> select_terms(const std::vector<std::pair<std::string, std::uint32_t>>& tf,
                                        std::size_t max_terms) const;
  // BM25 of every document containing at least one term, as (doc, score).
  std::vector<std::pair<std::size_t, double>> bm25(const std::vector<std::string>& terms) const;

  nlohmann::json to_json() const;
  static LexicalIndex from_json(const nlohmann::json& j);

 private:
  void rebuild();

  std::vector<std::string> ids_;
  std::vector<std::vector<std::pair<std::string, std::uint32_t>>> forward_;
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::map<std::string, std::size_t, std::less<>> doc_of_;
};

struct Exclusion {
  std::string ticket_id;
  std::string index;  // feature set or "lexical"
  std::string reason;
};

// Everything the recommender needs for one content scope.
struct IndexSet {
  ContentScope scope = ContentScope::Combined;
  std::map<FeatureSet, VectorIndex> vectors;
  LexicalIndex lexical;
  std::map<std::string, std::string> snippets;  // ticket id -> first 200 cleaned chars
  std::vector<Exclusion> exclusions;

  void save(const std::filesystem::path& dir, ArtifactManifest manifest) const;
  static IndexSet load(const std::filesystem::path& dir);
};

struct IndexOptions {
  textprep::CleanConfig clean;
  textprep::DocPrep lexical_prep;  // alnum_with_paths, stopwords removed
};

IndexSet build_index(const Corpus& corpus, ContentScope scope,
                     const std::vector<const FeatureModel*>& models, const IndexOptions& options);

struct OverlapRow {
  std::string method;
  double mean_shared = 0.0;  // mean number of top-k hits sharing a category with the query
  std::size_t queries = 0;
};

struct OverlapReport {
  std::size_t sample_size = 0;
  std::size_t k = 3;
  std::vector<OverlapRow> rows;

  nlohmann::json to_json() const;
  std::string table() const;
};

struct TemplateHit {
  std::string ticket_id;
  double score = 0.0;
  double containment = 0.0;  // fraction of the template's unique tokens in the ticket
};

struct TemplateResult {
  std::string name;
  bool skipped = false;
  bool flagged = false;  // top hit containment >= threshold
  std::vector<TemplateHit> hits;
};

struct TemplateReport {
  double threshold = 0.8;
  std::vector<TemplateResult> templates;

  std::size_t flagged_count() const;
  nlohmann::json to_json() const;
  std::string table() const;
};

// Query layer over a corpus, its indexes and the feature models they were
// built with. Read-only and safe for concurrent queries.
class Recommender {
 public:
  Recommender(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const IndexSet> index,
              std::map<FeatureSet, std::shared_ptr<const FeatureModel>> models,
              IndexOptions options);

  const Corpus& corpus() const { return *corpus_; }
  const IndexSet& index() const { return *index_; }
  std::vector<FeatureSet> feature_sets() const;

  std::vector<SimilarHit> cosine_similar(FeatureSet feature_set, const Query& query, std::size_t k,
                                         const QueryFilter& filter = {},
                                         bool exclude_self = true) const;
  // Jaccard similarity of unique lexical tokens.
  std::vector<SimilarHit> naive_overlap(const Query& query, std::size_t k,
                                        const QueryFilter& filter = {}) const;
  // Top tf-idf terms of the query scored against the index with BM25.
  std::vector<SimilarHit> more_like_this(const Query& query, std::size_t k,
                                         const QueryFilter& filter = {},
                                         std::size_t max_query_terms = 25) const;

  OverlapReport category_overlap_study(std::size_t sample_size, std::size_t k,
                                       std::uint64_t seed, bool include_baselines = true) const;
  TemplateReport template_scan(const std::vector<std::pair<std::string, std::string>>& templates,
                               std::size_t k_per_template, double containment_threshold = 0.8) const;

 private:
  std::vector<std::pair<std::string, std::uint32_t>> query_terms(const Query& query) const;
  std::vector<SimilarHit> rank(std::vector<std::pair<std::string, double>> scored, std::size_t k,
                               const std::string& method) const;
  bool admissible(const std::string& id, const QueryFilter& filter,
                  const std::optional<std::string>& self) const;

  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<const IndexSet> index_;
  std::map<FeatureSet, std::shared_ptr<const FeatureModel>> models_;
  IndexOptions options_;
};

// Reads every regular file in `dir` as a template named after the file stem,
// sorted by name.
std::vector<std::pair<std::string, std::string>> load_templates(const std::filesystem::path& dir);

}  // namespace ticketscope
