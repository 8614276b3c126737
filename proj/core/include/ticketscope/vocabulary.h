#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace ticketscope {

// Term <-> index bijection with document and collection frequencies.
// Terms are ordered lexicographically so that the same documents always give
// the same indices.
class Vocabulary {
 public:
  using Docs = std::vector<std::vector<std::string>>;

  Vocabulary() = default;
  // Keeps terms whose collection frequency is >= min_count.
  static Vocabulary build(const Docs& docs, std::size_t min_count = 1);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::optional<std::uint32_t> index(std::string_view term) const;
  const std::string& term(std::size_t i) const { return terms_[i]; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t df(std::size_t i) const { return df_[i]; }
  std::size_t count(std::size_t i) const { return cf_[i]; }
  std::size_t total_docs() const { return n_docs_; }

  // In-vocabulary token indices in document order; OOV tokens dropped.
  std::vector<std::uint32_t> encode(const std::vector<std::string>& tokens) const;
  std::string hash() const;

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  void reindex();

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<std::size_t> cf_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace ticketscope
