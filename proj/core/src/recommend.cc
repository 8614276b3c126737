#include "ticketscope/recommend.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

namespace {

constexpr std::size_t kSnippetLength = 200;

std::string optional_time(const std::optional<Timestamp>& t) {
  return t ? format_utc_timestamp(*t) : std::string();
}

bool by_score_then_id(const std::pair<std::string, double>& a,
                      const std::pair<std::string, double>& b) {
  return a.second != b.second ? a.second > b.second : a.first < b.first;
}

std::vector<std::pair<std::string, std::uint32_t>> term_counts(
    const std::vector<std::string>& tokens) {
  std::map<std::string, std::uint32_t> counts;
  for (const auto& t : tokens) ++counts[t];
  return {counts.begin(), counts.end()};
}

}  // namespace

// ---------------------------------------------------------------- QueryFilter

bool QueryFilter::empty() const {
  return !date_from && !date_to && !owner && !requestor && categories.empty();
}

bool QueryFilter::matches(const Ticket& t) const {
  if (date_from && t.created < *date_from) return false;
  if (date_to && t.created > *date_to) return false;
  if (owner && t.owner != *owner) return false;
  if (requestor && t.requestor != *requestor) return false;
  if (!categories.empty() &&
      std::none_of(t.categories.begin(), t.categories.end(),
                   [&](const std::string& c) { return categories.contains(c); }))
    return false;
  return true;
}

nlohmann::json QueryFilter::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (date_from) j["date_from"] = optional_time(date_from);
  if (date_to) j["date_to"] = optional_time(date_to);
  if (owner) j["owner"] = *owner;
  if (requestor) j["requestor"] = *requestor;
  if (!categories.empty()) j["categories"] = categories;
  return j;
}

QueryFilter QueryFilter::from_json(const nlohmann::json& j) {
  QueryFilter f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw InvalidInput("filter must be an object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    if (key == "date_from") {
      f.date_from = parse_date_or_timestamp(value.get<std::string>());
    } else if (key == "date_to") {
      const auto s = value.get<std::string>();
      f.date_to = parse_date_or_timestamp(s);
      if (s.size() == 10) *f.date_to += std::chrono::seconds{86399};
    } else if (key == "owner") {
      f.owner = value.get<std::string>();
    } else if (key == "requestor") {
      f.requestor = value.get<std::string>();
    } else if (key == "categories") {
      for (const auto& c : value) f.categories.insert(c.get<std::string>());
    } else {
      throw InvalidInput("unknown filter field '" + key + "'");
    }
  }
  return f;
}

nlohmann::json SimilarHit::to_json() const {
  return {{"ticket_id", ticket_id}, {"score", score}, {"feature_set", feature_set},
          {"snippet", snippet}};
}

// ---------------------------------------------------------------- VectorIndex

VectorIndex VectorIndex::build(const FeatureModel& model, const std::vector<std::string>& ids,
                               const std::vector<std::vector<std::string>>& token_docs) {
  if (ids.size() != token_docs.size()) throw InvalidInput("ids and documents differ in length");
  VectorIndex index;
  index.feature_set_ = model.id();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    FeatureVector v = model.transform(token_docs[i]);
    const double norm = l2_norm(v.values);
    if (v.degenerate || !(norm > 0.0) || !std::isfinite(norm)) {
      index.excluded_.push_back(ids[i]);
      continue;
    }
    for (double& x : v.values) x /= norm;
    index.ids_.push_back(ids[i]);
    rows.push_back(std::move(v.values));
  }
  index.vectors_ = Matrix(rows.size(), model.dimension());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), index.vectors_.row(r).begin());
  index.reindex();
  return index;
}

void VectorIndex::reindex() {
  row_.clear();
  for (std::size_t r = 0; r < ids_.size(); ++r) row_.emplace(ids_[r], r);
}

std::optional<std::size_t> VectorIndex::row_of(std::string_view id) const {
  auto it = row_.find(id);
  if (it == row_.end()) return std::nullopt;
  return it->second;
}

void VectorIndex::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "rows.json", {{"feature_set", std::string(to_string(feature_set_))},
                                      {"ids", ids_},
                                      {"excluded", excluded_}});
  write_matrix_blob(dir / "vectors.bin", vectors_);
}

VectorIndex VectorIndex::load(const std::filesystem::path& dir) {
  VectorIndex index;
  const auto j = read_json_file(dir / "rows.json");
  index.feature_set_ = feature_set_from_string(j.at("feature_set").get<std::string>());
  index.ids_ = j.at("ids").get<std::vector<std::string>>();
  index.excluded_ = j.at("excluded").get<std::vector<std::string>>();
  index.vectors_ = read_matrix_blob(dir / "vectors.bin");
  if (index.vectors_.rows != index.ids_.size())
    throw Error("vector index in " + dir.string() + " has " + std::to_string(index.vectors_.rows) +
                " rows for " + std::to_string(index.ids_.size()) + " ids");
  index.reindex();
  return index;
}

// ---------------------------------------------------------------- LexicalIndex

LexicalIndex LexicalIndex::build(const std::vector<std::string>& ids,
                                 const std::vector<std::vector<std::string>>& token_docs) {
  if (ids.size() != token_docs.size()) throw InvalidInput("ids and documents differ in length");
  LexicalIndex index;
  index.ids_ = ids;
  for (const auto& doc : token_docs) index.forward_.push_back(term_counts(doc));
  index.rebuild();
  return index;
}

void LexicalIndex::rebuild() {
  postings_.clear();
  doc_of_.clear();
  lengths_.assign(forward_.size(), 0);
  double total = 0.0;
  for (std::size_t d = 0; d < forward_.size(); ++d) {
    doc_of_.emplace(ids_[d], d);
    for (const auto& [term, tf] : forward_[d]) {
      postings_[term].push_back({static_cast<std::uint32_t>(d), tf});
      lengths_[d] += tf;
    }
    total += static_cast<double>(lengths_[d]);
  }
  avg_length_ = forward_.empty() ? 0.0 : total / static_cast<double>(forward_.size());
}

std::optional<std::size_t> LexicalIndex::doc_of(std::string_view id) const {
  auto it = doc_of_.find(id);
  if (it == doc_of_.end()) return std::nullopt;
  return it->second;
}

std::size_t LexicalIndex::df(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

const std::vector<LexicalIndex::Posting>* LexicalIndex::postings(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

double LexicalIndex::idf(std::string_view term) const {
  const double n = static_cast<double>(ids_.size());
  const double d = static_cast<double>(df(term));
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<std::string> LexicalIndex::select_terms(
    const std::vector<std::pair<std::string, std::uint32_t>>& tf, std::size_t max_terms) const {
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [term, count] : tf)
    if (df(term) > 0) scored.emplace_back(term, count * idf(term));
  std::sort(scored.begin(), scored.end(), by_score_then_id);
  if (scored.size() > max_terms) scored.resize(max_terms);
  std::vector<std::string> out;
  for (auto& s : scored) out.push_back(std::move(s.first));
  return out;
}

std::vector<std::pair<std::size_t, double>> LexicalIndex::bm25(
    const std::vector<std::string>& terms) const {
  std::map<std::size_t, double> scores;
  for (const auto& term : terms) {
    const auto* plist = postings(term);
    if (!plist) continue;
    const double w = idf(term);
    for (const Posting& p : *plist) {
      const double tf = p.tf;
      const double norm = kK1 * (1.0 - kB + kB * static_cast<double>(lengths_[p.doc]) / avg_length_);
      scores[p.doc] += w * tf * (kK1 + 1.0) / (tf + norm);
    }
  }
  return {scores.begin(), scores.end()};
}

nlohmann::json LexicalIndex::to_json() const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& terms : forward_) {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& [term, tf] : terms) d.push_back({term, tf});
    docs.push_back(std::move(d));
  }
  return {{"ids", ids_}, {"docs", std::move(docs)}};
}

LexicalIndex LexicalIndex::from_json(const nlohmann::json& j) {
  LexicalIndex index;
  index.ids_ = j.at("ids").get<std::vector<std::string>>();
  for (const auto& d : j.at("docs")) {
    std::vector<std::pair<std::string, std::uint32_t>> terms;
    for (const auto& e : d) terms.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::uint32_t>());
    index.forward_.push_back(std::move(terms));
  }
  if (index.forward_.size() != index.ids_.size()) throw Error("lexical index ids and docs differ");
  index.rebuild();
  return index;
}

// ---------------------------------------------------------------- IndexSet

void IndexSet::save(const std::filesystem::path& dir, ArtifactManifest manifest) const {
  std::filesystem::create_directories(dir);
  manifest.kind = "index";
  manifest.feature_set.clear();
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& [fs, index] : vectors) {
    sets.push_back(std::string(to_string(fs)));
    index.save(dir / std::string(to_string(fs)));
  }
  manifest.hyperparameters = {{"scope", std::string(to_string(scope))}, {"feature_sets", sets}};
  write_json_file(dir / "lexical.json", lexical.to_json());
  nlohmann::json excl = nlohmann::json::array();
  for (const auto& e : exclusions)
    excl.push_back({{"ticket_id", e.ticket_id}, {"index", e.index}, {"reason", e.reason}});
  write_json_file(dir / "documents.json", {{"snippets", snippets}, {"exclusions", excl}});
  write_manifest(dir, manifest);
}

IndexSet IndexSet::load(const std::filesystem::path& dir) {
  const ArtifactManifest manifest = read_manifest(dir);
  if (manifest.kind != "index")
    throw Error(dir.string() + " holds a '" + manifest.kind + "' artifact, not an index");
  IndexSet set;
  try {
    set.scope = scope_from_string(manifest.hyperparameters.at("scope").get<std::string>());
    for (const auto& name : manifest.hyperparameters.at("feature_sets")) {
      const FeatureSet fs = feature_set_from_string(name.get<std::string>());
      set.vectors.emplace(fs, VectorIndex::load(dir / name.get<std::string>()));
    }
    set.lexical = LexicalIndex::from_json(read_json_file(dir / "lexical.json"));
    const auto docs = read_json_file(dir / "documents.json");
    set.snippets = docs.at("snippets").get<std::map<std::string, std::string>>();
    for (const auto& e : docs.at("exclusions"))
      set.exclusions.push_back({e.at("ticket_id").get<std::string>(), e.at("index").get<std::string>(),
                                e.at("reason").get<std::string>()});
  } catch (...) {
    std::throw_with_nested(Error("cannot load index from " + dir.string()));
  }
  return set;
}

IndexSet build_index(const Corpus& corpus, ContentScope scope,
                     const std::vector<const FeatureModel*>& models, const IndexOptions& options) {
  IndexSet set;
  set.scope = scope;
  std::vector<std::string> ids;
  std::vector<std::string> cleaned;
  for (const Ticket& t : corpus.tickets()) {
    const auto text = scope_text(t, scope);
    if (!text || trim(*text).empty()) {
      set.exclusions.push_back({t.id, "all", "no text in scope " + std::string(to_string(scope))});
      continue;
    }
    ids.push_back(t.id);
    cleaned.push_back(textprep::clean(*text, options.clean));
    set.snippets.emplace(t.id, cleaned.back().substr(0, kSnippetLength));
  }

  std::vector<std::vector<std::string>> lex_docs;
  for (const auto& c : cleaned) lex_docs.push_back(options.lexical_prep.tokens_from_clean(c, options.clean));
  std::vector<std::string> lex_ids;
  std::vector<std::vector<std::string>> lex_kept;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (lex_docs[i].empty()) {
      set.exclusions.push_back({ids[i], "lexical", "no tokens"});
      continue;
    }
    lex_ids.push_back(ids[i]);
    lex_kept.push_back(std::move(lex_docs[i]));
  }
  set.lexical = LexicalIndex::build(lex_ids, lex_kept);

  for (const FeatureModel* model : models) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& c : cleaned) docs.push_back(model->spec().prep.tokens_from_clean(c, options.clean));
    VectorIndex index = VectorIndex::build(*model, ids, docs);
    for (const auto& id : index.excluded())
      set.exclusions.push_back({id, std::string(to_string(model->id())), "no in-vocabulary tokens"});
    set.vectors.emplace(model->id(), std::move(index));
  }
  return set;
}

// ---------------------------------------------------------------- Recommender

Recommender::Recommender(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const IndexSet> index,
                         std::map<FeatureSet, std::shared_ptr<const FeatureModel>> models,
                         IndexOptions options)
    : corpus_(std::move(corpus)), index_(std::move(index)), models_(std::move(models)),
      options_(std::move(options)) {
  if (!corpus_ || !index_) throw InvalidInput("recommender needs a corpus and an index");
}

std::vector<FeatureSet> Recommender::feature_sets() const {
  std::vector<FeatureSet> out;
  for (FeatureSet f : standard_feature_sets())
    if (index_->vectors.contains(f)) out.push_back(f);
  return out;
}

bool Recommender::admissible(const std::string& id, const QueryFilter& filter,
                             const std::optional<std::string>& self) const {
  if (self && id == *self) return false;
  if (filter.empty()) return true;
  const Ticket* t = corpus_->find(id);
  return t && filter.matches(*t);
}

std::vector<SimilarHit> Recommender::rank(std::vector<std::pair<std::string, double>> scored,
                                          std::size_t k, const std::string& method) const {
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    by_score_then_id);
  std::vector<SimilarHit> hits;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = index_->snippets.find(scored[i].first);
    hits.push_back({scored[i].first, scored[i].second, method,
                    it == index_->snippets.end() ? std::string() : it->second});
  }
  return hits;
}

std::vector<SimilarHit> Recommender::cosine_similar(FeatureSet feature_set, const Query& query,
                                                    std::size_t k, const QueryFilter& filter,
                                                    bool exclude_self) const {
  auto it = index_->vectors.find(feature_set);
  if (it == index_->vectors.end())
    throw NotFound("no index for feature set " + std::string(to_string(feature_set)));
  const VectorIndex& vi = it->second;

  std::vector<double> q;
  std::optional<std::string> self;
  if (query.ticket_id) {
    if (!corpus_->find(*query.ticket_id)) throw NotFound("unknown ticket '" + *query.ticket_id + "'");
    const auto row = vi.row_of(*query.ticket_id);
    if (!row)
      throw DegenerateQuery("ticket '" + *query.ticket_id + "' has no " +
                            std::string(to_string(feature_set)) + " vector (degenerate query)");
    const auto r = vi.vectors().row(*row);
    q.assign(r.begin(), r.end());
    if (exclude_self) self = *query.ticket_id;
  } else if (query.text) {
    auto mit = models_.find(feature_set);
    if (mit == models_.end())
      throw NotFound("no feature model loaded for " + std::string(to_string(feature_set)));
    FeatureVector v = mit->second->transform(mit->second->tokens(*query.text, options_.clean));
    const double norm = l2_norm(v.values);
    if (v.degenerate || !(norm > 0.0)) throw DegenerateQuery("degenerate query: no in-vocabulary tokens");
    for (double& x : v.values) x /= norm;
    q = std::move(v.values);
  } else {
    throw InvalidInput("query needs a ticket id or text");
  }

  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t r = 0; r < vi.size(); ++r) {
    const std::string& id = vi.ids()[r];
    if (!admissible(id, filter, self)) continue;
    scored.emplace_back(id, std::clamp(dot(q, vi.vectors().row(r)), -1.0, 1.0));
  }
  return rank(std::move(scored), k, std::string(to_string(feature_set)));
}

std::vector<std::pair<std::string, std::uint32_t>> Recommender::query_terms(const Query& query) const {
  if (query.ticket_id) {
    if (!corpus_->find(*query.ticket_id)) throw NotFound("unknown ticket '" + *query.ticket_id + "'");
    const auto doc = index_->lexical.doc_of(*query.ticket_id);
    if (!doc) throw DegenerateQuery("ticket '" + *query.ticket_id + "' has no indexed tokens");
    return index_->lexical.doc_terms(*doc);
  }
  if (query.text) return term_counts(options_.lexical_prep.tokens(*query.text, options_.clean));
  throw InvalidInput("query needs a ticket id or text");
}

std::vector<SimilarHit> Recommender::naive_overlap(const Query& query, std::size_t k,
                                                   const QueryFilter& filter) const {
  const auto terms = query_terms(query);
  if (terms.empty()) throw DegenerateQuery("degenerate query: empty token set");
  const LexicalIndex& lex = index_->lexical;
  if (std::none_of(terms.begin(), terms.end(), [&](const auto& t) { return lex.df(t.first) > 0; }))
    throw DegenerateQuery("degenerate query: no query token occurs in the index");
  std::set<std::string_view> a;
  for (const auto& [t, _] : terms) a.insert(t);
  std::optional<std::string> self = query.ticket_id;
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t d = 0; d < lex.size(); ++d) {
    if (!admissible(lex.ids()[d], filter, self)) continue;
    const auto& b = lex.doc_terms(d);
    std::size_t inter = 0;
    for (const auto& [t, _] : b) inter += a.contains(t);
    const std::size_t uni = a.size() + b.size() - inter;
    scored.emplace_back(lex.ids()[d], uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0);
  }
  return rank(std::move(scored), k, "naive");
}

std::vector<SimilarHit> Recommender::more_like_this(const Query& query, std::size_t k,
                                                    const QueryFilter& filter,
                                                    std::size_t max_query_terms) const {
  const LexicalIndex& lex = index_->lexical;
  const auto terms = lex.select_terms(query_terms(query), max_query_terms);
  if (terms.empty()) throw DegenerateQuery("degenerate query: no query terms survive selection");
  std::optional<std::string> self = query.ticket_id;
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [doc, score] : lex.bm25(terms))
    if (admissible(lex.ids()[doc], filter, self)) scored.emplace_back(lex.ids()[doc], score);
  return rank(std::move(scored), k, "mlt");
}

OverlapReport Recommender::category_overlap_study(std::size_t sample_size, std::size_t k,
                                                  std::uint64_t seed, bool include_baselines) const {
  std::vector<std::string> pool;
  for (const Ticket& t : corpus_->tickets())
    if (!t.categories.empty() && index_->snippets.contains(t.id)) pool.push_back(t.id);
  if (pool.empty()) throw InvalidInput("no categorized, indexed tickets to sample");
  if (sample_size > pool.size()) {
    warn("overlap study: sample_size " + std::to_string(sample_size) + " exceeds the " +
         std::to_string(pool.size()) + " eligible tickets; using all of them");
    sample_size = pool.size();
  }
  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(sample_size);
  std::sort(pool.begin(), pool.end());

  auto shared = [&](const Ticket& q, const std::vector<SimilarHit>& hits) {
    std::size_t n = 0;
    for (const auto& h : hits) {
      const Ticket& t = corpus_->at(h.ticket_id);
      n += std::any_of(t.categories.begin(), t.categories.end(),
                       [&](const std::string& c) { return q.has_category(c); });
    }
    return n;
  };

  OverlapReport report;
  report.sample_size = sample_size;
  report.k = k;
  auto run = [&](const std::string& name, auto&& search) {
    OverlapRow row{name, 0.0, 0};
    double total = 0.0;
    for (const auto& id : pool) {
      try {
        total += static_cast<double>(shared(corpus_->at(id), search(Query::ticket(id))));
        ++row.queries;
      } catch (const DegenerateQuery&) {
        continue;
      }
    }
    row.mean_shared = row.queries ? total / static_cast<double>(row.queries) : 0.0;
    report.rows.push_back(row);
  };
  for (FeatureSet f : feature_sets())
    run(std::string(to_string(f)), [&](const Query& q) { return cosine_similar(f, q, k); });
  if (include_baselines) {
    run("naive", [&](const Query& q) { return naive_overlap(q, k); });
    run("mlt", [&](const Query& q) { return more_like_this(q, k); });
  }
  return report;
}

nlohmann::json OverlapReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"method", r.method}, {"mean_shared", r.mean_shared}, {"queries", r.queries}});
  return {{"sample_size", sample_size}, {"k", k}, {"rows", rows_json}};
}

std::string OverlapReport::table() const {
  std::string out = "method      mean shared categories in top-" + std::to_string(k) + "  queries\n";
  char line[128];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-11s %-34.3f %zu\n", r.method.c_str(), r.mean_shared, r.queries);
    out += line;
  }
  return out;
}

TemplateReport Recommender::template_scan(
    const std::vector<std::pair<std::string, std::string>>& templates, std::size_t k_per_template,
    double containment_threshold) const {
  if (templates.empty()) throw InvalidInput("template scan needs at least one template");
  TemplateReport report;
  report.threshold = containment_threshold;
  const LexicalIndex& lex = index_->lexical;
  for (const auto& [name, body] : templates) {
    TemplateResult result{name, false, false, {}};
    const auto tokens = options_.lexical_prep.tokens(body, options_.clean);
    if (tokens.empty()) {
      warn("template '" + name + "' has no usable tokens; skipped");
      result.skipped = true;
      report.templates.push_back(std::move(result));
      continue;
    }
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    std::vector<SimilarHit> hits;
    try {
      hits = more_like_this(Query::free_text(body), k_per_template);
    } catch (const DegenerateQuery&) {
      // No template term occurs in the corpus.
    }
    for (const auto& h : hits) {
      const auto& terms = lex.doc_terms(*lex.doc_of(h.ticket_id));
      std::size_t present = 0;
      for (const auto& w : unique)
        present += std::binary_search(terms.begin(), terms.end(), std::pair<std::string, std::uint32_t>{w, 0},
                                      [](const auto& x, const auto& y) { return x.first < y.first; });
      result.hits.push_back({h.ticket_id, h.score,
                             static_cast<double>(present) / static_cast<double>(unique.size())});
    }
    result.flagged = !result.hits.empty() && result.hits.front().containment >= containment_threshold;
    report.templates.push_back(std::move(result));
  }
  return report;
}

std::size_t TemplateReport::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(templates.begin(), templates.end(), [](const auto& t) { return t.flagged; }));
}

nlohmann::json TemplateReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : templates) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : t.hits)
      hits.push_back({{"ticket_id", h.ticket_id}, {"score", h.score}, {"containment", h.containment}});
    list.push_back({{"name", t.name}, {"skipped", t.skipped}, {"flagged", t.flagged}, {"hits", hits}});
  }
  return {{"threshold", threshold}, {"flagged", flagged_count()}, {"templates", list}};
}

std::string TemplateReport::table() const {
  std::string out = "template                  flagged  top hit     score     containment\n";
  char line[160];
  for (const auto& t : templates) {
    if (t.skipped) {
      std::snprintf(line, sizeof line, "%-25s %-8s (skipped)\n", t.name.c_str(), "-");
    } else if (t.hits.empty()) {
      std::snprintf(line, sizeof line, "%-25s %-8s (no matches)\n", t.name.c_str(), "no");
    } else {
      const auto& h = t.hits.front();
      std::snprintf(line, sizeof line, "%-25s %-8s %-11s %-9.3f %.3f\n", t.name.c_str(),
                    t.flagged ? "yes" : "no", h.ticket_id.c_str(), h.score, h.containment);
    }
    out += line;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_templates(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InvalidInput("template directory not found: " + dir.string());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) out.emplace_back(entry.path().stem().string(), read_file(entry.path()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ticketscope
