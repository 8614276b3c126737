#include "ticketscope/service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>

#include <httplib.h>

#include "ticketscope/autocat.h"
#include "ticketscope/community.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

namespace fs = std::filesystem;
using nlohmann::json;

struct ServiceSnapshot {
  std::shared_ptr<const Corpus> corpus;
  std::string corpus_hash;
  std::string mismatch;
  std::shared_ptr<Recommender> recommender;
  std::vector<FeatureSet> indexed;
  std::map<FeatureSet, Classifier> classifiers;
  std::shared_ptr<const FeatureModel> words;
  json topics;    // null when no LDA model is stored
  json clusters;  // null when cluster-words has not been run
};

namespace {

// Maps to 400.
class BadRequest : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

std::shared_ptr<const ServiceSnapshot> load_snapshot(const ModelStore& store, std::shared_ptr<const Corpus> corpus,
                                                     const ServiceOptions& options) {
  auto snap = std::make_shared<ServiceSnapshot>();
  snap->corpus = corpus;
  snap->corpus_hash = corpus->content_hash();
  if (!store.has_index(options.similar_scope))
    throw Error("store " + store.root().string() + " has no " + std::string(to_string(options.similar_scope)) +
                " index; run fit first");
  try {
    snap->recommender = open_recommender(store, corpus, options.similar_scope, options.config);
    snap->indexed = snap->recommender->feature_sets();
    for (FeatureSet f : store.classifiers())
      if (store.has_model(ContentScope::CreateOnly, f))
        snap->classifiers.emplace(f, open_classifier(store, *corpus, f));

    const ContentScope other = options.similar_scope == ContentScope::Combined ? ContentScope::CreateOnly
                                                                               : ContentScope::Combined;
    for (ContentScope s : {options.similar_scope, other}) {
      if (!store.has_model(s, FeatureSet::DocVec)) continue;
      snap->words = std::make_shared<const FeatureModel>(store.load_model(s, FeatureSet::DocVec, snap->corpus_hash));
      break;
    }
    const std::pair<ContentScope, FeatureSet> topic_sources[] = {
        {ContentScope::Combined, FeatureSet::Lda10Labeling},
        {ContentScope::Combined, FeatureSet::Lda10},
        {ContentScope::CreateOnly, FeatureSet::Lda10}};
    for (const auto& [s, f] : topic_sources) {
      if (!store.has_model(s, f)) continue;
      const FeatureModel m = store.load_model(s, f, snap->corpus_hash);
      snap->topics = {{"feature_set", std::string(to_string(f))},
                      {"scope", std::string(to_string(s))},
                      {"topics", topics_json(export_topics(*m.lda(), m.vocabulary(), 10))}};
      break;
    }
    if (fs::exists(store.clusters_dir() / "manifest.json")) {
      const ArtifactManifest m = read_manifest(store.clusters_dir());
      if (m.corpus_hash != snap->corpus_hash)
        throw StoreMismatch(store.clusters_dir().string() + " was built from a different corpus");
      snap->clusters = read_json_file(store.clusters_dir() / "clusters.json");
    }
  } catch (const StoreMismatch& e) {
    snap->mismatch = describe_exception(e);
  }
  return snap;
}

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, {{"error", {{"code", status}, {"message", message}}}});
}

std::size_t parse_count(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || v < 0) throw BadRequest(name + " must be a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

double parse_number(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw BadRequest(name + " must be a number, got '" + text + "'");
  return v;
}

std::size_t check_k(std::size_t k, std::size_t cap) {
  if (k < 1 || k > cap) throw BadRequest("k must be between 1 and " + std::to_string(cap) + ", got " + std::to_string(k));
  return k;
}

std::size_t k_param(const HttpRequest& r, std::size_t fallback, std::size_t cap) {
  auto it = r.params.find("k");
  return check_k(it == r.params.end() ? fallback : parse_count("k", it->second), cap);
}

std::size_t k_field(const json& body, std::size_t fallback, std::size_t cap) {
  if (!body.contains("k")) return check_k(fallback, cap);
  const json& k = body["k"];
  if (!k.is_number_integer() || k.get<long long>() < 1) throw BadRequest("k must be a positive integer");
  return check_k(k.get<std::size_t>(), cap);
}

json parse_body(const HttpRequest& r) {
  json body;
  try {
    body = json::parse(r.body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("request body is not valid JSON: ") + e.what());
  }
  if (!body.is_object()) throw BadRequest("request body must be a JSON object");
  return body;
}

void allow_fields(const json& body, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : body.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw BadRequest("unknown field '" + key + "'");
}

std::string string_field(const json& body, const std::string& name) {
  if (!body.contains(name)) return {};
  if (!body[name].is_string()) throw BadRequest(name + " must be a string");
  return body[name].get<std::string>();
}

json hits_json(const std::vector<SimilarHit>& hits) {
  json out = json::array();
  for (const auto& h : hits) out.push_back(h.to_json());
  return out;
}

HttpResponse similar(const ServiceSnapshot& snap, const HttpRequest& r, std::size_t cap) {
  const json body = parse_body(r);
  allow_fields(body, {"ticket_id", "text", "feature_sets", "k", "filter"});
  const bool by_ticket = body.contains("ticket_id"), by_text = body.contains("text");
  if (by_ticket == by_text) throw BadRequest("give exactly one of ticket_id and text");
  const Query query = by_ticket ? Query::ticket(string_field(body, "ticket_id"))
                                : Query::free_text(string_field(body, "text"));
  if (by_text && trim(*query.text).empty()) throw BadRequest("text is empty");
  if (by_ticket) snap.corpus->at(*query.ticket_id);
  const std::size_t k = k_field(body, 3, cap);
  QueryFilter filter;
  if (body.contains("filter")) filter = QueryFilter::from_json(body["filter"]);

  std::vector<std::string> methods;
  if (body.contains("feature_sets")) {
    if (!body["feature_sets"].is_array() || body["feature_sets"].empty())
      throw BadRequest("feature_sets must be a non-empty array");
    for (const auto& f : body["feature_sets"]) {
      if (!f.is_string()) throw BadRequest("feature_sets entries must be strings");
      methods.push_back(f.get<std::string>());
    }
  } else {
    for (FeatureSet f : snap.indexed) methods.emplace_back(to_string(f));
  }

  json results = json::array();
  std::size_t degenerate = 0;
  for (const auto& m : methods) {
    json entry{{"feature_set", m}, {"degenerate", false}, {"hits", json::array()}};
    try {
      if (m == "naive") {
        entry["hits"] = hits_json(snap.recommender->naive_overlap(query, k, filter));
      } else if (m == "mlt") {
        entry["hits"] = hits_json(snap.recommender->more_like_this(query, k, filter));
      } else {
        FeatureSet f;
        try {
          f = feature_set_from_string(m);
        } catch (const std::exception&) {
          throw BadRequest("unknown feature set '" + m + "'");
        }
        if (std::find(snap.indexed.begin(), snap.indexed.end(), f) == snap.indexed.end())
          throw BadRequest("feature set '" + m + "' is not indexed");
        entry["hits"] = hits_json(snap.recommender->cosine_similar(f, query, k, filter));
      }
    } catch (const DegenerateQuery&) {
      entry["degenerate"] = true;
      ++degenerate;
    }
    results.push_back(std::move(entry));
  }
  if (degenerate == methods.size())
    throw DegenerateQuery("degenerate query: nothing in the query is in any requested vocabulary");
  json q = by_ticket ? json{{"ticket_id", *query.ticket_id}} : json{{"text", *query.text}};
  return json_response(200, {{"query", q}, {"k", k}, {"filter", filter.to_json()}, {"results", results}});
}

HttpResponse suggest(const ServiceSnapshot& snap, const HttpRequest& r, std::size_t cap,
                     const textprep::CleanConfig& clean) {
  const json body = parse_body(r);
  allow_fields(body, {"subject", "create_message", "k", "feature_set"});
  const std::string subject = string_field(body, "subject");
  const std::string message = string_field(body, "create_message");
  if (trim(subject).empty() && trim(message).empty()) throw BadRequest("subject and create_message are both empty");
  const std::size_t k = k_field(body, 3, cap);
  if (snap.classifiers.empty()) throw NotFound("the store has no category classifier");
  FeatureSet f = snap.classifiers.contains(FeatureSet::Lsa) ? FeatureSet::Lsa : snap.classifiers.begin()->first;
  if (body.contains("feature_set")) {
    const std::string name = string_field(body, "feature_set");
    try {
      f = feature_set_from_string(name);
    } catch (const std::exception&) {
      throw BadRequest("unknown feature set '" + name + "'");
    }
    if (!snap.classifiers.contains(f)) throw NotFound("no classifier for feature set '" + name + "'");
  }
  json out = json::array();
  for (const auto& s : snap.classifiers.at(f).suggest(subject, message, k, clean))
    out.push_back({{"category", s.category}, {"probability", s.probability}});
  return json_response(200, {{"feature_set", std::string(to_string(f))}, {"suggestions", out}});
}

HttpResponse similar_words(const ServiceSnapshot& snap, const HttpRequest& r, std::size_t cap,
                           const textprep::CleanConfig& clean) {
  auto it = r.params.find("w");
  if (it == r.params.end() || trim(it->second).empty()) throw BadRequest("missing query parameter w");
  const std::size_t k = k_param(r, 10, cap);
  if (!snap.words) throw NotFound("the store has no docvec model");
  // Words in the model are cleaned and stemmed; look up the same form.
  const auto tokens = snap.words->tokens(it->second, clean);
  const std::string token = tokens.size() == 1 ? tokens.front() : trim(it->second);
  json neighbors = json::array();
  for (const auto& [w, sim] : snap.words->embedding()->similar_words(token, k))
    neighbors.push_back({{"word", w}, {"similarity", sim}});
  return json_response(200, {{"word", it->second}, {"token", token}, {"neighbors", neighbors}});
}

HttpResponse graph(const ServiceSnapshot& snap, const HttpRequest& r) {
  auto param = [&](const std::string& name) -> std::optional<std::string> {
    auto it = r.params.find(name);
    return it == r.params.end() ? std::nullopt : std::optional(it->second);
  };
  const std::string kind = param("kind").value_or("user-consultant");
  CommunityGraph g;
  if (kind == "user-consultant") {
    UserConsultantOptions opts;
    if (auto w = param("min_weight")) opts.min_edge_weight = parse_count("min_weight", *w);
    if (auto m = param("machines")) opts.include_machines = *m == "true" || *m == "1";
    g = build_user_consultant_graph(*snap.corpus, opts);
  } else if (kind == "consultant-category") {
    std::size_t min_tickets = 200;
    if (auto w = param("min_weight")) min_tickets = parse_count("min_weight", *w);
    g = build_consultant_category_graph(*snap.corpus, min_tickets);
  } else {
    throw BadRequest("kind must be user-consultant or consultant-category");
  }
  if (auto focus = param("focus")) {
    const std::size_t radius = param("radius") ? parse_count("radius", *param("radius")) : 1;
    g = subgraph(g, *focus, radius);
  }
  if (param("format").value_or("json") == "dot") return {200, g.to_dot(), "text/vnd.graphviz"};
  return json_response(200, g.to_json());
}

}  // namespace

Service::Service(fs::path store, std::shared_ptr<const Corpus> corpus, ServiceOptions options)
    : store_(std::move(store)), corpus_(std::move(corpus)), options_(std::move(options)) {
  if (!options_.request_log) {
    options_.request_log = [](const json& entry) {
      static std::mutex log_mutex;
      std::lock_guard lock(log_mutex);
      std::cerr << entry.dump() << '\n';
    };
  }
  snapshot_ = load_snapshot(store_, corpus_, options_);
  if (!snapshot_->mismatch.empty()) warn("store/corpus mismatch, serving 409: " + snapshot_->mismatch);
}

Service::~Service() = default;

void Service::reload() {
  auto fresh = load_snapshot(store_, corpus_, options_);
  std::lock_guard lock(mutex_);
  snapshot_ = std::move(fresh);
}

std::string Service::store_mismatch() const { return snapshot()->mismatch; }

std::shared_ptr<const ServiceSnapshot> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

HttpResponse Service::handle(const HttpRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  const auto snap = snapshot();
  HttpResponse response;
  if (!snap->mismatch.empty()) {
    response = error_response(409, snap->mismatch);
  } else {
    try {
      response = dispatch(*snap, request);
    } catch (const InvalidInput& e) {
      response = error_response(400, describe_exception(e));
    } catch (const DegenerateQuery& e) {
      response = error_response(400, describe_exception(e));
    } catch (const NotFound& e) {
      response = error_response(404, describe_exception(e));
    } catch (const StoreMismatch& e) {
      response = error_response(409, describe_exception(e));
    } catch (const json::exception& e) {
      response = error_response(400, e.what());
    } catch (const std::exception& e) {
      response = error_response(500, describe_exception(e));
    }
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  options_.request_log({{"method", request.method},
                        {"path", request.path},
                        {"status", response.status},
                        {"bytes", response.body.size()},
                        {"duration_ms", ms}});
  return response;
}

HttpResponse Service::dispatch(const ServiceSnapshot& snap, const HttpRequest& r) const {
  const std::string& p = r.path;
  const bool get = r.method == "GET", post = r.method == "POST";
  const std::size_t cap = options_.max_k;
  auto wrong_method = [&] { return error_response(405, r.method + " not allowed on " + p); };

  if (p == "/health") {
    if (!get) return wrong_method();
    json indexed = json::array(), classifiers = json::array();
    for (FeatureSet f : snap.indexed) indexed.push_back(std::string(to_string(f)));
    for (const auto& [f, _] : snap.classifiers) classifiers.push_back(std::string(to_string(f)));
    return json_response(200, {{"status", "ok"},
                               {"corpus_hash", snap.corpus_hash},
                               {"tickets", snap.corpus->size()},
                               {"scope", std::string(to_string(options_.similar_scope))},
                               {"feature_sets", indexed},
                               {"classifiers", classifiers},
                               {"words", snap.words != nullptr},
                               {"topics", !snap.topics.is_null()},
                               {"clusters", !snap.clusters.is_null()},
                               {"max_k", cap}});
  }
  if (p.starts_with("/tickets/")) {
    if (!get) return wrong_method();
    return json_response(200, snap.corpus->at(p.substr(9)).to_json());
  }
  if (p == "/suggest-category") return post ? suggest(snap, r, cap, options_.config.clean) : wrong_method();
  if (p == "/similar") return post ? similar(snap, r, cap) : wrong_method();
  if (p == "/words/similar") return get ? similar_words(snap, r, cap, options_.config.clean) : wrong_method();
  if (p == "/stats/volume") {
    if (!get) return wrong_method();
    const json stats = corpus_stats(*snap.corpus).to_json();
    return json_response(200, {{"total_tickets", stats["total_tickets"]}, {"months", stats["monthly_volume"]}});
  }
  if (p == "/stats/categories") {
    if (!get) return wrong_method();
    double threshold = 0.02;
    if (auto it = r.params.find("threshold"); it != r.params.end()) threshold = parse_number("threshold", it->second);
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw BadRequest("threshold must be in [0, 1]");
    json stats = corpus_stats(*snap.corpus, threshold).to_json();
    stats.erase("monthly_volume");
    stats["threshold"] = threshold;
    return json_response(200, stats);
  }
  if (p == "/graph") return get ? graph(snap, r) : wrong_method();
  if (p == "/topics") {
    if (!get) return wrong_method();
    if (snap.topics.is_null()) throw NotFound("the store has no LDA model");
    return json_response(200, snap.topics);
  }
  if (p == "/clusters") {
    if (!get) return wrong_method();
    if (snap.clusters.is_null()) throw NotFound("the store has no word clustering; run cluster-words");
    return json_response(200, snap.clusters);
  }
  return error_response(404, "no endpoint " + p);
}

int Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) r.params.emplace(key, value);
    const HttpResponse out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind to " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind to " + host + ":" + std::to_string(port));
  return port;
}

void Service::run() {
  if (!server_) throw Error("service is not bound");
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace ticketscope
