// ticketscope: command-line front end over the core library.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ticketscope/autocat.h"
#include "ticketscope/classify.h"
#include "ticketscope/community.h"
#include "ticketscope/corpus.h"
#include "ticketscope/error.h"
#include "ticketscope/pipeline.h"
#include "ticketscope/recommend.h"
#include "ticketscope/service.h"
#include "ticketscope/synthetic.h"
#include "ticketscope/textprep.h"

namespace ts = ticketscope;
using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct Globals {
  std::string corpus = env_or("TICKETSCOPE_CORPUS", "corpus.jsonl");
  std::string store = env_or("TICKETSCOPE_STORE", "store");
  bool json = false;
  std::uint64_t seed = 7;
  std::string timestamp;
};

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json) std::cout << j.dump(2) << '\n';
  else std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
}

std::shared_ptr<const ts::Corpus> open_corpus(const Globals& g) {
  return std::make_shared<const ts::Corpus>(ts::load_corpus(g.corpus));
}

const std::vector<std::string> kFeatureNames{"lda10", "lda500", "lsa", "docvec", "lda10-labeling", "all"};
const std::vector<std::string> kScopeNames{"create_only", "combined"};

std::vector<ts::FeatureSet> expand_feature_sets(const std::vector<std::string>& names) {
  std::vector<ts::FeatureSet> out;
  auto add = [&](ts::FeatureSet f) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  };
  for (const auto& n : names) {
    if (n == "all") for (auto f : ts::standard_feature_sets()) add(f);
    else add(ts::feature_set_from_string(n));
  }
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Optional per-model overrides; unset flags keep each feature set's preset.
struct ModelFlags {
  std::optional<std::size_t> lda_topics, lda_iterations, lsa_dim, docvec_dim, docvec_window,
      docvec_min_count, docvec_negative, docvec_epochs, min_count;
  std::optional<double> lda_alpha, lda_beta;
  std::size_t min_support = 10;
  std::size_t trees = 10;
  std::size_t max_depth = 0;

  void add(CLI::App* app) {
    app->add_option("--lda-topics", lda_topics, "LDA topic count (preset: 10 or 500)");
    app->add_option("--lda-alpha", lda_alpha, "LDA per-topic alpha (preset: 10 for lda10, 0.01 for lda500)");
    app->add_option("--lda-beta", lda_beta, "LDA per-word beta (preset: 0.005)");
    app->add_option("--lda-iterations", lda_iterations, "Gibbs sweeps (preset: 1000)");
    app->add_option("--lsa-dim", lsa_dim, "LSA dimension (default 100)");
    app->add_option("--docvec-dim", docvec_dim, "DocVec dimension (default 400)");
    app->add_option("--docvec-window", docvec_window, "DocVec context window (default 10)");
    app->add_option("--docvec-min-count", docvec_min_count, "DocVec minimum word count (default 5)");
    app->add_option("--docvec-negative", docvec_negative, "negative samples per pair (default 5)");
    app->add_option("--docvec-epochs", docvec_epochs, "DocVec training epochs (default 20)");
    app->add_option("--min-count", min_count, "vocabulary cut-off for LDA and LSA (default 1)");
    app->add_option("--min-support", min_support, "minimum tickets per category in the labeled dataset")
        ->capture_default_str();
    app->add_option("--trees", trees, "random forest size")->capture_default_str();
    app->add_option("--max-depth", max_depth, "random forest depth limit, 0 = none")->capture_default_str();
  }

  ts::PipelineConfig config(const Globals& g) const {
    ts::PipelineConfig c;
    c.seed = g.seed;
    c.created_at = g.timestamp;
    c.min_support = min_support;
    c.forest.n_trees = trees;
    c.forest.max_depth = max_depth;
    for (ts::FeatureSet f : {ts::FeatureSet::Lda10, ts::FeatureSet::Lda500, ts::FeatureSet::Lsa,
                             ts::FeatureSet::DocVec, ts::FeatureSet::Lda10Labeling}) {
      ts::FeatureSpec s = ts::FeatureSpec::defaults(f);
      if (lda_topics) s.lda.n_topics = *lda_topics;
      if (lda_alpha) s.lda.alpha = *lda_alpha;
      if (lda_beta) s.lda.beta = *lda_beta;
      if (lda_iterations) s.lda.iterations = *lda_iterations;
      if (lsa_dim) s.lsa.dimension = *lsa_dim;
      if (docvec_dim) s.embedding.dim = *docvec_dim;
      if (docvec_window) s.embedding.window = *docvec_window;
      if (docvec_min_count) s.embedding.min_count = *docvec_min_count;
      if (docvec_negative) s.embedding.negative = *docvec_negative;
      if (docvec_epochs) s.embedding.epochs = *docvec_epochs;
      if (min_count) s.min_count = *min_count;
      c.specs[f] = s;
    }
    return c;
  }
};

struct FilterFlags {
  std::optional<std::string> owner, requestor, date_from, date_to;
  std::vector<std::string> categories;

  void add(CLI::App* app) {
    app->add_option("--owner", owner, "only tickets owned by this consultant");
    app->add_option("--requestor", requestor, "only tickets from this requestor");
    app->add_option("--date-from", date_from, "earliest creation date, YYYY-MM-DD or ISO timestamp");
    app->add_option("--date-to", date_to, "latest creation date, inclusive");
    app->add_option("--category", categories, "only tickets carrying one of these categories");
  }

  ts::QueryFilter filter() const {
    json j = json::object();
    if (owner) j["owner"] = *owner;
    if (requestor) j["requestor"] = *requestor;
    if (date_from) j["date_from"] = *date_from;
    if (date_to) j["date_to"] = *date_to;
    if (!categories.empty()) j["categories"] = categories;
    return ts::QueryFilter::from_json(j);
  }
};

struct QueryFlags {
  std::optional<std::string> ticket, text;
  std::size_t k = 3;
  std::string scope = "combined";

  void add(CLI::App* app) {
    auto* t = app->add_option("--ticket", ticket, "query ticket id");
    auto* x = app->add_option("--text", text, "free-text query");
    t->excludes(x);
    app->add_option("--k", k, "hits per list")->capture_default_str()->check(CLI::Range(1, 100));
    app->add_option("--scope", scope, "index scope")->capture_default_str()->check(CLI::IsMember(kScopeNames));
  }

  ts::Query query() const {
    if (ticket) return ts::Query::ticket(*ticket);
    if (text) return ts::Query::free_text(*text);
    throw ts::InvalidInput("give --ticket or --text");
  }
};

json hits_json(const std::vector<ts::SimilarHit>& hits) {
  json out = json::array();
  for (const auto& h : hits) out.push_back(h.to_json());
  return out;
}

std::string hits_text(const std::string& title, const std::vector<ts::SimilarHit>& hits) {
  std::string out = title + ":\n";
  if (hits.empty()) out += "  (no hits)\n";
  for (std::size_t i = 0; i < hits.size(); ++i) {
    std::string snippet = hits[i].snippet.substr(0, 70);
    out += "  " + std::to_string(i + 1) + ". " + hits[i].ticket_id + "  " + fmt("%.4f", hits[i].score) + "  " +
           snippet + "\n";
  }
  return out;
}

int serve_until_signal(ts::Service& service, const std::string& host, int port) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const int bound = service.bind(host, port);
  std::cerr << json{{"event", "listening"}, {"host", host}, {"port", bound}}.dump() << std::endl;
  std::thread waiter([&] {
    for (;;) {
      int sig = 0;
      sigwait(&signals, &sig);
      if (sig == SIGHUP) {
        try {
          service.reload();
          std::cerr << json{{"event", "reloaded"}}.dump() << std::endl;
        } catch (const std::exception& e) {
          std::cerr << json{{"event", "reload_failed"}, {"error", ts::describe_exception(e)}}.dump() << std::endl;
        }
        continue;
      }
      service.stop();
      return;
    }
  });
  service.run();
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-ticket analytics: cleaning, feature sets, category suggestion, similar tickets, "
               "topic labeling and community graphs.",
               "ticketscope"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file supplying option defaults; flags override it");
  Globals g;
  app.add_option("--corpus", g.corpus, "ticket JSONL file (env TICKETSCOPE_CORPUS)")->capture_default_str();
  app.add_option("--store", g.store, "model store directory (env TICKETSCOPE_STORE)")->capture_default_str();
  app.add_flag("--json", g.json, "machine-readable JSON output");
  app.add_option("--seed", g.seed, "seed for every stochastic step")->capture_default_str();
  app.add_option("--timestamp", g.timestamp, "created_at written into manifests (default: now)");

  std::map<std::string, std::function<void()>> actions;

  // gen-corpus
  ts::SyntheticSpec synth;
  std::string labels = "topic";
  std::optional<std::string> gen_out;
  {
    auto* c = app.add_subcommand("gen-corpus", "write a synthetic ticket corpus");
    c->add_option("--n", synth.n_tickets, "number of tickets")->capture_default_str();
    c->add_option("--categories", synth.n_categories, "number of categories/topics")->capture_default_str();
    c->add_option("--vocab", synth.vocab_size, "vocabulary size")->capture_default_str();
    c->add_option("--sharpness", synth.topic_sharpness, "share of words drawn from the ticket's topic")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--labels", labels, "category labels follow the topic or are random")
        ->capture_default_str()->check(CLI::IsMember({"topic", "random"}));
    c->add_option("--out", gen_out, "output path (default: --corpus)");
    actions["gen-corpus"] = [&] {
      synth.seed = g.seed;
      synth.label_mode = labels == "random" ? ts::LabelMode::Random : ts::LabelMode::TopicAligned;
      const auto generated = ts::generate_synthetic_corpus(synth);
      const std::string path = gen_out.value_or(g.corpus);
      ts::save_tickets(path, generated.tickets);
      const ts::Corpus corpus = ts::load_corpus(path);
      emit(g,
           {{"path", path}, {"tickets", generated.tickets.size()}, {"active_tickets", corpus.size()},
            {"categories", synth.n_categories}, {"labels", labels}, {"corpus_hash", corpus.content_hash()}},
           "wrote " + std::to_string(generated.tickets.size()) + " tickets to " + path + " (corpus hash " +
               corpus.content_hash() + ")");
    };
  }

  // ingest
  std::string ingest_in;
  std::optional<std::string> ingest_out;
  {
    auto* c = app.add_subcommand("ingest", "validate a ticket JSONL file and optionally write a canonical copy");
    c->add_option("input", ingest_in, "JSONL or JSONL.gz file")->required();
    c->add_option("--out", ingest_out, "write the active tickets as canonical JSONL");
    actions["ingest"] = [&] {
      const auto all = ts::load_tickets(ingest_in, {.include_inactive = true});
      const ts::Corpus corpus = ts::load_corpus(ingest_in);
      if (ingest_out) ts::save_tickets(*ingest_out, corpus.tickets());
      emit(g,
           {{"input", ingest_in}, {"tickets", all.size()}, {"active_tickets", corpus.size()},
            {"corpus_hash", corpus.content_hash()}},
           std::to_string(all.size()) + " tickets read, " + std::to_string(corpus.size()) +
               " active (corpus hash " + corpus.content_hash() + ")");
    };
  }

  // clean
  std::optional<std::string> clean_text, clean_ticket;
  std::string clean_scope = "combined", clean_pattern = "alnum_with_paths";
  bool keep_stopwords = false;
  {
    auto* c = app.add_subcommand("clean", "show the cleaned text and tokens of a ticket or string");
    auto* t = c->add_option("--text", clean_text, "raw text");
    c->add_option("--ticket", clean_ticket, "ticket id from the corpus")->excludes(t);
    c->add_option("--scope", clean_scope, "ticket text scope")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    c->add_option("--pattern", clean_pattern, "token pattern")
        ->capture_default_str()
        ->check(CLI::IsMember({"alpha_only", "alnum_leading_letter", "alnum_with_paths"}));
    c->add_flag("--keep-stopwords", keep_stopwords, "do not remove English stopwords from the tokens");
    actions["clean"] = [&] {
      std::string raw;
      if (clean_text) {
        raw = *clean_text;
      } else if (clean_ticket) {
        const auto corpus = open_corpus(g);
        auto text = ts::scope_text(corpus->at(*clean_ticket), ts::scope_from_string(clean_scope));
        if (!text) throw ts::InvalidInput("ticket " + *clean_ticket + " has no " + clean_scope + " text");
        raw = *text;
      } else {
        throw ts::InvalidInput("give --text or --ticket");
      }
      const ts::textprep::CleanConfig config;
      const std::string cleaned = ts::textprep::clean(raw, config);
      ts::textprep::DocPrep prep{ts::textprep::token_pattern_from_string(clean_pattern), !keep_stopwords};
      const auto tokens = prep.tokens_from_clean(cleaned, config);
      emit(g, {{"clean", cleaned}, {"tokens", tokens}}, cleaned + "\n" + ts::join(tokens, " "));
    };
  }

  // fit
  ModelFlags fit_flags;
  std::vector<std::string> fit_sets{"all"};
  std::string fit_scope = "both";
  bool no_classifiers = false, no_index = false;
  {
    auto* c = app.add_subcommand("fit", "fit feature models, train classifiers and rebuild indexes");
    c->add_option("--feature-set", fit_sets, "feature sets to fit")->capture_default_str()->check(CLI::IsMember(kFeatureNames));
    c->add_option("--scope", fit_scope, "text scope to fit on")
        ->capture_default_str()
        ->check(CLI::IsMember({"create_only", "combined", "both"}));
    c->add_flag("--no-classifiers", no_classifiers, "skip category classifiers");
    c->add_flag("--no-index", no_index, "skip index rebuilds");
    fit_flags.add(c);
    actions["fit"] = [&] {
      const auto corpus = open_corpus(g);
      ts::FitRequest request;
      request.feature_sets = expand_feature_sets(fit_sets);
      if (fit_scope != "both") request.scopes = {ts::scope_from_string(fit_scope)};
      request.train_classifiers = !no_classifiers;
      request.build_indexes = !no_index;
      const ts::ModelStore store(g.store);
      const auto summary = ts::fit_store(store, *corpus, request, fit_flags.config(g));
      std::string text;
      for (const auto& [scope, f] : summary.fitted)
        text += "fitted " + std::string(ts::to_string(f)) + " on " + std::string(ts::to_string(scope)) + "\n";
      for (auto f : summary.classifiers) text += "trained " + std::string(ts::to_string(f)) + " classifier\n";
      for (auto s : summary.indexes) text += "indexed " + std::string(ts::to_string(s)) + "\n";
      emit(g, summary.to_json(), text);
    };
  }

  // index
  std::string index_scope = "both";
  {
    auto* c = app.add_subcommand("index", "rebuild similarity indexes from the stored feature models");
    c->add_option("--scope", index_scope, "scope to index")
        ->capture_default_str()
        ->check(CLI::IsMember({"create_only", "combined", "both"}));
    actions["index"] = [&] {
      const auto corpus = open_corpus(g);
      const ts::ModelStore store(g.store);
      ts::PipelineConfig config;
      config.seed = g.seed;
      config.created_at = g.timestamp;
      std::vector<ts::ContentScope> scopes{ts::ContentScope::CreateOnly, ts::ContentScope::Combined};
      if (index_scope != "both") scopes = {ts::scope_from_string(index_scope)};
      json out = json::array();
      std::string text;
      for (auto s : scopes) {
        const auto index = ts::build_store_index(store, *corpus, s, config);
        json sets = json::array();
        for (const auto& [f, v] : index.vectors) sets.push_back({{"feature_set", std::string(ts::to_string(f))}, {"documents", v.size()}});
        out.push_back({{"scope", std::string(ts::to_string(s))}, {"vectors", sets}, {"excluded", index.exclusions.size()}});
        text += std::string(ts::to_string(s)) + ": " + std::to_string(index.vectors.size()) + " vector indexes, " +
                std::to_string(index.exclusions.size()) + " exclusions\n";
      }
      emit(g, out, text);
    };
  }

  // eval
  std::vector<std::string> eval_sets;
  ts::EvalConfig eval;
  ModelFlags eval_flags;
  {
    auto* c = app.add_subcommand("eval", "evaluate category prediction with repeated stratified splits");
    c->add_option("--feature-set", eval_sets, "feature sets to evaluate (default: every stored create_only model)")->check(CLI::IsMember(kFeatureNames));
    c->add_option("--trials", eval.n_trials, "number of random splits")->capture_default_str();
    c->add_option("--test-fraction", eval.test_fraction, "held-out share per class")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--k", eval.k, "accuracy@k cut-off")->capture_default_str()->check(CLI::Range(1, 100));
    eval_flags.add(c);
    actions["eval"] = [&] {
      const auto corpus = open_corpus(g);
      const ts::ModelStore store(g.store);
      const ts::PipelineConfig config = eval_flags.config(g);
      eval.seed = g.seed;
      eval.forest = config.forest;
      std::vector<ts::EvalReport> reports;
      json out = json::array();
      const auto sets = eval_sets.empty() ? store.models(ts::ContentScope::CreateOnly) : expand_feature_sets(eval_sets);
      if (sets.empty()) throw ts::NotFound("no create_only feature models in " + g.store + "; run fit first");
      for (auto f : sets) {
        if (f == ts::FeatureSet::Lda10Labeling) continue;
        reports.push_back(ts::evaluate_store(store, *corpus, f, eval, config));
        out.push_back(reports.back().to_json());
      }
      emit(g, out, ts::format_eval_table(reports));
    };
  }

  // suggest
  std::string sug_subject, sug_message, sug_set = "lsa";
  std::size_t sug_k = 3;
  {
    auto* c = app.add_subcommand("suggest", "suggest categories for a new ticket");
    c->add_option("--subject", sug_subject, "ticket subject");
    c->add_option("--message", sug_message, "create message");
    c->add_option("--k", sug_k, "number of suggestions")->capture_default_str()->check(CLI::Range(1, 100));
    c->add_option("--feature-set", sug_set, "classifier feature set")
        ->capture_default_str()
        ->check(CLI::IsMember({"lda10", "lda500", "lsa", "docvec"}));
    actions["suggest"] = [&] {
      if (ts::trim(sug_subject).empty() && ts::trim(sug_message).empty())
        throw ts::InvalidInput("give --subject and/or --message");
      const auto corpus = open_corpus(g);
      const auto classifier = ts::open_classifier(ts::ModelStore(g.store), *corpus, ts::feature_set_from_string(sug_set));
      const auto suggestions = classifier.suggest(sug_subject, sug_message, sug_k, {});
      json out = json::array();
      std::string text;
      for (std::size_t i = 0; i < suggestions.size(); ++i) {
        out.push_back({{"category", suggestions[i].category}, {"probability", suggestions[i].probability}});
        text += std::to_string(i + 1) + ". " + suggestions[i].category + "  " + fmt("%.3f", suggestions[i].probability) + "\n";
      }
      emit(g, {{"feature_set", sug_set}, {"suggestions", out}}, text);
    };
  }

  // similar
  QueryFlags sim_query;
  FilterFlags sim_filter;
  std::vector<std::string> sim_sets{"all"};
  {
    auto* c = app.add_subcommand("similar", "cosine-similar tickets per feature set");
    sim_query.add(c);
    sim_filter.add(c);
    c->add_option("--feature-set", sim_sets, "feature sets to query, plus naive and mlt baselines")
        ->capture_default_str()
        ->check(CLI::IsMember({"lda10", "lda500", "lsa", "docvec", "all", "naive", "mlt"}));
    actions["similar"] = [&] {
      const auto corpus = open_corpus(g);
      ts::PipelineConfig config;
      const auto rec = ts::open_recommender(ts::ModelStore(g.store), corpus, ts::scope_from_string(sim_query.scope), config);
      const ts::Query q = sim_query.query();
      const ts::QueryFilter filter = sim_filter.filter();
      std::vector<std::string> methods;
      for (const auto& s : sim_sets) {
        if (s == "all") for (auto f : rec->feature_sets()) methods.emplace_back(ts::to_string(f));
        else methods.push_back(s);
      }
      json out = json::array();
      std::string text;
      for (const auto& m : methods) {
        std::vector<ts::SimilarHit> hits;
        if (m == "naive") hits = rec->naive_overlap(q, sim_query.k, filter);
        else if (m == "mlt") hits = rec->more_like_this(q, sim_query.k, filter);
        else hits = rec->cosine_similar(ts::feature_set_from_string(m), q, sim_query.k, filter);
        out.push_back({{"feature_set", m}, {"hits", hits_json(hits)}});
        text += hits_text(m, hits);
      }
      emit(g, {{"k", sim_query.k}, {"filter", filter.to_json()}, {"results", out}}, text);
    };
  }

  // mlt
  QueryFlags mlt_query;
  FilterFlags mlt_filter;
  std::size_t mlt_terms = 25;
  {
    auto* c = app.add_subcommand("mlt", "more-like-this lexical similarity (BM25 over top tf-idf terms)");
    mlt_query.add(c);
    mlt_filter.add(c);
    c->add_option("--max-terms", mlt_terms, "query terms kept")->capture_default_str();
    actions["mlt"] = [&] {
      const auto corpus = open_corpus(g);
      const auto rec = ts::open_recommender(ts::ModelStore(g.store), corpus, ts::scope_from_string(mlt_query.scope), {});
      const auto hits = rec->more_like_this(mlt_query.query(), mlt_query.k, mlt_filter.filter(), mlt_terms);
      emit(g, {{"hits", hits_json(hits)}}, hits_text("mlt", hits));
    };
  }

  // overlap-study
  std::size_t study_sample = 200, study_k = 3;
  std::string study_scope = "combined";
  bool no_baselines = false;
  {
    auto* c = app.add_subcommand("overlap-study", "how many top-k hits share a category with the query");
    c->add_option("--sample", study_sample, "query tickets sampled")->capture_default_str();
    c->add_option("--k", study_k, "hits per query")->capture_default_str()->check(CLI::Range(1, 100));
    c->add_option("--scope", study_scope, "index scope")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    c->add_flag("--no-baselines", no_baselines, "skip the naive and mlt rows");
    actions["overlap-study"] = [&] {
      const auto corpus = open_corpus(g);
      const auto rec = ts::open_recommender(ts::ModelStore(g.store), corpus, ts::scope_from_string(study_scope), {});
      const auto report = rec->category_overlap_study(study_sample, study_k, g.seed, !no_baselines);
      emit(g, report.to_json(), report.table());
    };
  }

  // template-scan
  std::string templates_dir;
  std::size_t tmpl_k = 5;
  double tmpl_threshold = 0.8;
  std::string tmpl_scope = "combined";
  {
    auto* c = app.add_subcommand("template-scan", "find tickets answered with a canned reply");
    c->add_option("--templates", templates_dir, "directory of template text files")->required();
    c->add_option("--k", tmpl_k, "hits per template")->capture_default_str()->check(CLI::Range(1, 100));
    c->add_option("--threshold", tmpl_threshold, "containment needed to flag a template")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--scope", tmpl_scope, "index scope")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    actions["template-scan"] = [&] {
      const auto corpus = open_corpus(g);
      const auto rec = ts::open_recommender(ts::ModelStore(g.store), corpus, ts::scope_from_string(tmpl_scope), {});
      const auto report = rec->template_scan(ts::load_templates(templates_dir), tmpl_k, tmpl_threshold);
      emit(g, report.to_json(), report.table());
    };
  }

  // topics
  std::string topics_set = "lda10-labeling", topics_scope = "combined";
  std::size_t topics_words = 10;
  std::optional<std::string> topics_out;
  {
    auto* c = app.add_subcommand("topics", "export LDA topics as a labeling worksheet");
    c->add_option("--feature-set", topics_set, "LDA feature set")
        ->capture_default_str()
        ->check(CLI::IsMember({"lda10", "lda500", "lda10-labeling"}));
    c->add_option("--scope", topics_scope, "scope the model was fitted on")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    c->add_option("--words", topics_words, "top words per topic")->capture_default_str();
    c->add_option("--out", topics_out, "write the CSV worksheet here");
    actions["topics"] = [&] {
      const auto corpus = open_corpus(g);
      const auto model = ts::ModelStore(g.store).load_model(
          ts::scope_from_string(topics_scope), ts::feature_set_from_string(topics_set), corpus->content_hash());
      const auto topics = ts::export_topics(*model.lda(), model.vocabulary(), topics_words);
      const std::string csv = ts::topics_csv(topics);
      if (topics_out) ts::write_file(*topics_out, csv);
      emit(g, ts::topics_json(topics), csv);
    };
  }

  // cluster-words
  ts::ClusterParams cparams;
  std::string c_alg = "kmedoids", c_dist = "cosine", c_strategy = "frequency", c_scope = "combined";
  {
    auto* c = app.add_subcommand("cluster-words", "cluster DocVec word vectors into candidate categories");
    c->add_option("--algorithm", c_alg, "clustering algorithm")
        ->capture_default_str()->check(CLI::IsMember({"kmeans", "kmedoids", "dbscan"}));
    c->add_option("--distance", c_dist, "distance")->capture_default_str()->check(CLI::IsMember({"euclidean", "cosine"}));
    c->add_option("--k", cparams.k, "clusters (kmeans, kmedoids)")->capture_default_str();
    c->add_option("--eps", cparams.eps, "dbscan radius, 0 = median 5th-neighbour distance")->capture_default_str();
    c->add_option("--min-pts", cparams.min_pts, "dbscan core threshold")->capture_default_str();
    c->add_option("--strategy", c_strategy, "representative word selection")
        ->capture_default_str()->check(CLI::IsMember({"frequency", "center_distance", "weighted"}));
    c->add_option("--representatives", cparams.n_representatives, "words shown per cluster")->capture_default_str();
    c->add_option("--alpha", cparams.alpha, "frequency weight for the weighted strategy")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c->add_option("--scope", c_scope, "scope the DocVec model was fitted on")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    actions["cluster-words"] = [&] {
      cparams.algorithm = ts::cluster_algorithm_from_string(c_alg);
      cparams.distance = ts::distance_from_string(c_dist);
      cparams.strategy = ts::representative_strategy_from_string(c_strategy);
      cparams.seed = g.seed;
      const auto corpus = open_corpus(g);
      ts::PipelineConfig config;
      config.created_at = g.timestamp;
      config.seed = g.seed;
      const auto clustering = ts::cluster_store_words(ts::ModelStore(g.store), *corpus, ts::scope_from_string(c_scope), cparams, config);
      emit(g, clustering.to_json(), clustering.table());
    };
  }

  // word-sim
  std::string ws_word, ws_scope = "combined";
  std::size_t ws_k = 10;
  {
    auto* c = app.add_subcommand("word-sim", "nearest words in the DocVec embedding");
    c->add_option("--word", ws_word, "query word")->required();
    c->add_option("--k", ws_k, "neighbours")->capture_default_str()->check(CLI::Range(1, 100));
    c->add_option("--scope", ws_scope, "scope the DocVec model was fitted on")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    actions["word-sim"] = [&] {
      const auto corpus = open_corpus(g);
      const auto model = ts::ModelStore(g.store).load_model(ts::scope_from_string(ws_scope), ts::FeatureSet::DocVec,
                                                            corpus->content_hash());
      const auto tokens = model.tokens(ws_word, {});
      const std::string token = tokens.size() == 1 ? tokens.front() : ws_word;
      json out = json::array();
      std::string text;
      for (const auto& [w, s] : model.embedding()->similar_words(token, ws_k)) {
        out.push_back({{"word", w}, {"similarity", s}});
        text += w + "  " + fmt("%.4f", s) + "\n";
      }
      emit(g, {{"word", ws_word}, {"token", token}, {"neighbors", out}}, text);
    };
  }

  // graph
  std::string graph_kind = "user-consultant", graph_format = "dot";
  std::optional<std::size_t> graph_min;
  std::optional<std::string> graph_focus;
  std::size_t graph_radius = 1;
  bool graph_machines = false, graph_no_unassigned = false;
  {
    auto* c = app.add_subcommand("graph", "user-consultant or consultant-category graph");
    c->add_option("--kind", graph_kind, "graph kind")
        ->capture_default_str()->check(CLI::IsMember({"user-consultant", "consultant-category"}));
    c->add_option("--min-weight", graph_min,
                  "minimum edge weight (user-consultant, default 1) or minimum tickets per category "
                  "(consultant-category, default 200)");
    c->add_option("--focus", graph_focus, "restrict to the neighbourhood of this node");
    c->add_option("--radius", graph_radius, "neighbourhood radius for --focus")->capture_default_str();
    c->add_option("--format", graph_format, "output format")->capture_default_str()->check(CLI::IsMember({"json", "dot"}));
    c->add_flag("--machines", graph_machines, "add user-machine edges");
    c->add_flag("--no-unassigned", graph_no_unassigned, "drop tickets without an owner");
    actions["graph"] = [&] {
      const auto corpus = open_corpus(g);
      ts::CommunityGraph graph;
      if (graph_kind == "user-consultant") {
        ts::UserConsultantOptions opts;
        opts.min_edge_weight = graph_min.value_or(1);
        opts.include_machines = graph_machines;
        opts.attach_unassigned = !graph_no_unassigned;
        graph = ts::build_user_consultant_graph(*corpus, opts);
      } else {
        graph = ts::build_consultant_category_graph(*corpus, graph_min.value_or(200));
      }
      if (graph_focus) graph = ts::subgraph(graph, *graph_focus, graph_radius);
      if (g.json || graph_format == "json") std::cout << graph.to_json().dump(2) << '\n';
      else std::cout << graph.to_dot();
    };
  }

  // stats
  double stats_threshold = 0.02;
  {
    auto* c = app.add_subcommand("stats", "monthly volume and category distribution");
    c->add_option("--threshold", stats_threshold, "categories below this share are grouped as other")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    actions["stats"] = [&] {
      const auto corpus = open_corpus(g);
      const auto stats = ts::corpus_stats(*corpus, stats_threshold);
      std::string text = "tickets: " + std::to_string(stats.total_tickets) + "\n\nmonth    tickets\n";
      for (const auto& [m, n] : stats.monthly_volume) text += m + "  " + std::to_string(n) + "\n";
      text += "\ncategory                  tickets  percent\n";
      char line[128];
      auto row = [&](const ts::CategoryShare& c) {
        std::snprintf(line, sizeof line, "%-25s %7zu  %6.2f\n", c.category.c_str(), c.count, c.percent * 100.0);
        text += line;
      };
      for (const auto& c : stats.categories) row(c);
      row(stats.other);
      emit(g, stats.to_json(), text);
    };
  }

  // serve
  std::string host = env_or("TICKETSCOPE_HOST", "127.0.0.1");
  int port = std::stoi(env_or("TICKETSCOPE_PORT", "8080"));
  std::string serve_scope = "combined";
  {
    auto* c = app.add_subcommand("serve", "HTTP JSON API over the store (SIGHUP reloads the store)");
    c->add_option("--host", host, "bind address (env TICKETSCOPE_HOST)")->capture_default_str();
    c->add_option("--port", port, "port, 0 = any free port (env TICKETSCOPE_PORT)")->capture_default_str();
    c->add_option("--scope", serve_scope, "index scope used by /similar")->capture_default_str()->check(CLI::IsMember(kScopeNames));
    actions["serve"] = [&] {
      ts::ServiceOptions options;
      options.similar_scope = ts::scope_from_string(serve_scope);
      ts::Service service(g.store, open_corpus(g), options);
      serve_until_signal(service, host, port);
    };
  }

  // describe
  {
    auto* c = app.add_subcommand("describe", "print the manifest of every stored artifact");
    actions["describe"] = [&] {
      const json manifests = ts::ModelStore(g.store).describe();
      std::string text;
      for (const auto& [path, m] : manifests.items()) {
        text += path + "  " + m.value("kind", "") ;
        if (!m.value("feature_set", "").empty()) text += " " + m.value("feature_set", "");
        text += "  corpus " + m.value("corpus_hash", "") + "  " + m.value("created_at", "") + "\n";
      }
      emit(g, manifests, text.empty() ? "store is empty" : text);
    };
    (void)c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto* sub : app.get_subcommands()) actions.at(sub->get_name())();
  } catch (const std::exception& e) {
    std::cerr << "error: " << ts::describe_exception(e) << '\n';
    return 1;
  }
  return 0;
}
