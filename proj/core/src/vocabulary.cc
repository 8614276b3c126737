#include "ticketscope/vocabulary.h"

#include <map>
#include <set>

#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

Vocabulary Vocabulary::build(const Docs& docs, std::size_t min_count) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // term -> (df, cf)
  for (const auto& doc : docs) {
    std::set<std::string_view> seen;
    for (const auto& tok : doc) {
      auto& s = stats[tok];
      ++s.second;
      if (seen.insert(tok).second) ++s.first;
    }
  }
  Vocabulary v;
  v.n_docs_ = docs.size();
  for (auto& [term, s] : stats) {
    if (s.second < min_count) continue;
    v.terms_.push_back(term);
    v.df_.push_back(s.first);
    v.cf_.push_back(s.second);
  }
  v.reindex();
  return v;
}

void Vocabulary::reindex() {
  index_.clear();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i)
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> Vocabulary::index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::uint32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (auto it = index_.find(t); it != index_.end()) out.push_back(it->second);
  return out;
}

std::string Vocabulary::hash() const { return hex64(hash_tokens(terms_)); }

nlohmann::json Vocabulary::to_json() const {
  return {{"terms", terms_}, {"df", df_}, {"cf", cf_}, {"n_docs", n_docs_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  try {
    v.terms_ = j.at("terms").get<std::vector<std::string>>();
    v.df_ = j.at("df").get<std::vector<std::size_t>>();
    v.cf_ = j.at("cf").get<std::vector<std::size_t>>();
    v.n_docs_ = j.at("n_docs").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid vocabulary: ") + e.what());
  }
  if (v.df_.size() != v.terms_.size() || v.cf_.size() != v.terms_.size())
    throw Error("invalid vocabulary: frequency arrays do not match terms");
  v.reindex();
  if (v.index_.size() != v.terms_.size()) throw Error("invalid vocabulary: duplicate terms");
  return v;
}

}  // namespace ticketscope
