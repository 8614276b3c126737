// Acceptance gate: one PASS/FAIL line per release criterion, non-zero exit
// when any criterion fails.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "metric_fixtures.h"
#include "oracles.h"
#include "test_support.h"
#include "ticketscope/autocat.h"
#include "ticketscope/blob.h"
#include "ticketscope/classify.h"
#include "ticketscope/community.h"
#include "ticketscope/error.h"
#include "ticketscope/lda.h"
#include "ticketscope/lsa.h"
#include "ticketscope/metrics.h"
#include "ticketscope/pipeline.h"
#include "ticketscope/recommend.h"
#include "ticketscope/schema.h"
#include "ticketscope/service.h"
#include "ticketscope/stemmer.h"
#include "ticketscope/synthetic.h"
#include "ticketscope/textprep.h"
#include "ticketscope/util.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ticketscope;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------------ cleaning

Outcome cleaning_golden() {
  testing::Stopwatch clock;
  const fs::path dir = testing::golden_dir() / "clean";
  std::size_t cases = 0, failed = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string f = e.path().filename().string();
    if (!f.ends_with(".in.txt")) continue;
    const std::string name = f.substr(0, f.size() - 7);
    ++cases;
    const std::string cleaned = textprep::clean(slurp(e.path()));
    std::ostringstream tokens;
    for (auto p : {textprep::TokenPattern::AlphaOnly, textprep::TokenPattern::AlnumLeadingLetter,
                   textprep::TokenPattern::AlnumWithPaths})
      tokens << textprep::to_string(p) << ": " << join(textprep::tokenize(cleaned, p), " ") << "\n";
    const auto kept = textprep::remove_stopwords(
        textprep::tokenize(cleaned, textprep::TokenPattern::AlnumWithPaths), textprep::english_stopwords_stemmed());
    tokens << "alnum_with_paths-stopwords_removed: " << join(kept, " ") << "\n";
    if (cleaned + "\n" != slurp(dir / (name + ".clean.txt")) || tokens.str() != slurp(dir / (name + ".tokens.txt")))
      ++failed;
  }
  const double secs = clock.seconds();
  return {cases >= 30 && failed == 0 && secs < 1.0,
          std::to_string(cases) + " cases, " + std::to_string(failed) + " mismatches, " + fmt("%.3f s", secs)};
}

// ------------------------------------------------------------------ stemmer

Outcome stemmer_conformance() {
  std::ifstream in(testing::golden_dir() / "stem" / "english.txt");
  std::string word, stem;
  std::size_t pairs = 0, wrong = 0;
  while (in >> word >> stem) {
    ++pairs;
    wrong += porter2_stem(word) != stem;
  }
  return {pairs >= 500 && wrong == 0, std::to_string(pairs) + " pairs, " + std::to_string(wrong) + " mismatches"};
}

// ------------------------------------------------------------------ LDA

Outcome lda_recovery() {
  testing::Stopwatch clock;
  SyntheticSpec spec;  // 2,000 tickets, 8 topics, sharpness 0.9, seed 7
  const SyntheticCorpus synth = generate_synthetic_corpus(spec);
  const Corpus corpus(synth.tickets);

  FeatureSpec fspec = FeatureSpec::defaults(FeatureSet::Lda10);
  fspec.lda.n_topics = spec.n_categories;
  const auto texts = clean_scope(corpus, ContentScope::Combined, {});
  const FeatureModel model = FeatureModel::fit(fspec, scope_tokens(texts, fspec.prep, {}));
  const LdaModel& lda = *model.lda();
  const Vocabulary& vocab = model.vocabulary();

  double worst_row = 0;
  std::vector<std::vector<double>> learned(lda.phi().rows, std::vector<double>(vocab.size()));
  for (std::size_t k = 0; k < lda.phi().rows; ++k) {
    double sum = 0;
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      learned[k][w] = lda.phi()(k, w);
      sum += lda.phi()(k, w);
    }
    worst_row = std::max(worst_row, std::abs(sum - 1.0));
  }

  // Generating distribution of each topic's documents over the learned vocabulary.
  std::map<std::string, double> background(synth.background_words.begin(), synth.background_words.end());
  std::vector<std::vector<double>> truth;
  for (const auto& topic : synth.topic_words) {
    std::map<std::string, double> tw(topic.begin(), topic.end());
    std::vector<double> v(vocab.size());
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      const std::string& term = vocab.term(w);
      v[w] = spec.topic_sharpness * (tw.contains(term) ? tw[term] : 0.0) +
             (1 - spec.topic_sharpness) * (background.contains(term) ? background[term] : 0.0);
    }
    truth.push_back(std::move(v));
  }
  const double alignment = oracle::greedy_alignment(learned, truth);
  const double secs = clock.seconds();
  return {alignment >= 0.8 && worst_row <= 1e-9 && secs < 120,
          "mean aligned cosine " + fmt("%.4f", alignment) + ", max |row sum - 1| " + fmt("%.1e", worst_row) + ", " +
              fmt("%.1f s", secs)};
}

// ------------------------------------------------------------------ LSA

Outcome lsa_oracle() {
  double worst_angle = 0;
  bool ordered = true;
  std::size_t checks = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    Eigen::MatrixXd a(30, 20);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
    for (std::size_t d : {5u, 10u}) {
      for (std::size_t limit : {1000u, 4u}) {  // exact path, then the randomized path
        TruncatedSvdOptions opt;
        opt.direct_limit = limit;
        const auto svd = truncated_svd(a.sparseView(), d, opt);
        worst_angle = std::max(worst_angle, oracle::max_principal_angle(svd.U, oracle::leading_left_subspace(a, d)));
        for (Eigen::Index i = 1; i < svd.S.size(); ++i) ordered = ordered && svd.S(i - 1) >= svd.S(i);
        ++checks;
      }
    }

    // The fitted LSA basis spans the leading subspace of its weighted term-document matrix.
    EncodedDocs docs(30);
    for (auto& doc : docs)
      for (std::size_t i = 0, n = 1 + rng.below(15); i < n; ++i) doc.push_back(static_cast<std::uint32_t>(rng.below(20)));
    LsaConfig config;
    config.dimension = 8;
    const LsaModel model = LsaModel::fit(docs, 20, config);
    const Eigen::MatrixXd x = Eigen::MatrixXd(model.weighted_matrix(docs));
    Eigen::MatrixXd basis(20, static_cast<Eigen::Index>(model.dimension()));
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < model.dimension(); ++j)
        basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.basis()(i, j);
    worst_angle = std::max(worst_angle, oracle::max_principal_angle(basis, oracle::leading_left_subspace(x, 8)));
    const auto& s = model.singular_values();
    for (std::size_t i = 1; i < s.size(); ++i) ordered = ordered && s[i - 1] >= s[i];
    ++checks;
  }
  return {worst_angle < 1e-6 && ordered, std::to_string(checks) + " decompositions, max principal angle " +
                                             fmt("%.1e", worst_angle) + (ordered ? ", sigma ordered" : ", sigma NOT ordered")};
}

// ------------------------------------------------------------------ classifier

Outcome classifier_pipeline() {
  testing::Stopwatch clock;
  SyntheticSpec spec;
  const auto corpus = testing::synthetic_corpus(spec);
  const LabeledDataset dataset = build_labeled_dataset(*corpus, 10);
  const auto texts = clean_scope(*corpus, ContentScope::CreateOnly, {});
  EvalConfig eval;
  eval.n_trials = 20;
  bool pass = true;
  std::string detail;
  for (FeatureSet fs : {FeatureSet::Lda500, FeatureSet::Lsa}) {
    const FeatureSpec fspec = FeatureSpec::defaults(fs);
    const FeatureModel model = FeatureModel::fit(fspec, scope_tokens(texts, fspec.prep, {}));
    const Matrix vectors = dataset_vectors(dataset, model, {});
    const EvalReport r = evaluate(dataset, vectors, fs, eval);
    const double acc1 = r.accuracy_at[0].mean, acc3 = r.accuracy_at[2].mean, f1 = r.weighted_f1.mean;
    // accuracy@1 <= accuracy@3 on every individual split, not only on average.
    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= eval.n_trials; ++seed) {
      EvalConfig single = eval;
      single.n_trials = 1;
      single.seed = seed;
      const EvalReport t = evaluate(dataset, vectors, fs, single);
      monotone = monotone && t.accuracy_at[0].mean <= t.accuracy_at[2].mean;
    }
    pass = pass && acc3 >= 0.70 && f1 >= 0.40 && monotone;
    detail += std::string(to_string(fs)) + " acc@1 " + fmt("%.3f", acc1) + " acc@3 " + fmt("%.3f", acc3) + " F1 " +
              fmt("%.3f", f1) + (monotone ? ", acc@1 <= acc@3 on all splits" : ", acc@1 > acc@3 on a split") + "; ";
  }
  const double secs = clock.seconds();
  return {pass && secs < 300, detail + fmt("%.1f s", secs)};
}

// ------------------------------------------------------------------ metrics

Outcome metrics_oracle() {
  std::size_t fixtures = 0, bad = 0;
  for (const auto& f : testing::metric_fixtures()) {
    ++fixtures;
    const auto exact = oracle::exact_weighted_scores(f.confusion);
    std::vector<std::size_t> y_true, y_pred;
    testing::expand(f, y_true, y_pred);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < f.confusion.size(); ++i) labels.push_back("L" + std::to_string(i));
    const auto s = score_predictions(y_true, y_pred, labels);
    const bool hand = exact.precision == f.precision && exact.recall == f.recall && exact.f1 == f.f1 &&
                      exact.accuracy == f.accuracy;
    const bool close = std::abs(s.weighted_precision - f.precision.value()) <= 1e-12 &&
                       std::abs(s.weighted_recall - f.recall.value()) <= 1e-12 &&
                       std::abs(s.weighted_f1 - f.f1.value()) <= 1e-12 &&
                       std::abs(s.accuracy - f.accuracy.value()) <= 1e-12;
    bad += !(hand && close);
  }
  const testing::RankFixture rf;
  Matrix proba(rf.proba.size(), 3);
  for (std::size_t i = 0; i < rf.proba.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) proba(i, j) = rf.proba[i][j];
  std::size_t rank_bad = 0;
  for (std::size_t k = 1; k <= 3; ++k)
    rank_bad += std::abs(accuracy_at_k(proba, rf.y_true, k) - rf.accuracy_at[k - 1].value()) > 1e-12;
  return {fixtures >= 5 && bad == 0 && rank_bad == 0,
          std::to_string(fixtures) + " confusion fixtures (" + std::to_string(bad) + " off), accuracy@k fixture " +
              (rank_bad ? "off" : "exact")};
}

// ------------------------------------------------------------------ recommender

const std::vector<std::string> kWords{"bafu", "keloz", "mirat", "dovu", "sapet", "gunok", "lirva", "tozam"};

// A world like testing::build_world but with the full presets.
testing::World full_world(std::shared_ptr<const Corpus> corpus, ContentScope scope) {
  testing::World w;
  w.corpus = std::move(corpus);
  const auto texts = clean_scope(*w.corpus, scope, {});
  std::vector<const FeatureModel*> raw;
  for (FeatureSet fs : standard_feature_sets()) {
    const FeatureSpec spec = FeatureSpec::defaults(fs);
    auto model = std::make_shared<const FeatureModel>(FeatureModel::fit(spec, scope_tokens(texts, spec.prep, {})));
    raw.push_back(model.get());
    w.models.emplace(fs, std::move(model));
  }
  w.index = std::make_shared<const IndexSet>(build_index(*w.corpus, scope, raw, {}));
  w.recommender = std::make_shared<Recommender>(w.corpus, w.index, w.models, IndexOptions{});
  return w;
}

Outcome recommender_oracles() {
  testing::Stopwatch clock;
  Rng rng(31);
  std::size_t corpora = 0, bm25_bad = 0, jaccard_bad = 0;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng.below(50);
    oracle::TokenDocs docs(n);
    std::vector<std::string> ids;
    std::vector<Ticket> tickets;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0, len = 1 + rng.below(12); j < len; ++j) docs[i].push_back(kWords[rng.below(kWords.size())]);
      ids.push_back("D" + std::to_string(100 + i));
      Ticket t;
      t.id = ids.back();
      t.created = parse_utc_timestamp("2018-01-01T00:00:00Z");
      t.requestor = "u";
      t.create_message = join(docs[i], " ");
      tickets.push_back(std::move(t));
    }
    ++corpora;
    // BM25 ranking over random term subsets.
    const LexicalIndex index = LexicalIndex::build(ids, docs);
    for (int q = 0; q < 10; ++q) {
      std::vector<std::string> terms;
      for (const auto& w : kWords)
        if (rng.uniform() < 0.4) terms.push_back(w);
      const auto expected_scores = oracle::bm25(docs, terms);
      std::vector<std::pair<std::string, double>> expected;
      for (std::size_t d = 0; d < n; ++d)
        if (expected_scores[d] > 0) expected.emplace_back(ids[d], expected_scores[d]);
      expected = oracle::ranked(expected);
      std::vector<std::pair<std::string, double>> got;
      for (const auto& [doc, score] : index.bm25(terms)) got.emplace_back(ids[doc], score);
      got = oracle::ranked(got);
      bool same = got.size() == expected.size();
      for (std::size_t r = 0; same && r < got.size(); ++r)
        same = std::abs(got[r].second - expected[r].second) <= 1e-12 &&
               (got[r].first == expected[r].first ||
                std::abs(expected_scores[static_cast<std::size_t>(std::stoi(got[r].first.substr(1)) - 100)] -
                         expected[r].second) <= 1e-12);
      bm25_bad += !same;
    }
    // Jaccard through the recommender.
    const auto world = testing::build_world(std::make_shared<const Corpus>(tickets), ContentScope::Combined, {});
    for (std::size_t qi = 0; qi < n && n > 1; ++qi) {
      std::vector<std::pair<std::string, double>> expected;
      for (std::size_t d = 0; d < n; ++d)
        if (d != qi) expected.emplace_back(ids[d], oracle::jaccard(docs[qi], docs[d]));
      expected = oracle::ranked(expected);
      const auto hits = world.recommender->naive_overlap(Query::ticket(ids[qi]), n);
      bool same = hits.size() == expected.size();
      for (std::size_t r = 0; same && r < hits.size(); ++r)
        same = hits[r].ticket_id == expected[r].first && hits[r].score == expected[r].second;
      jaccard_bad += !same;
    }
  }

  // Duplicate document: full presets on a 500-ticket corpus plus one copy.
  SyntheticSpec spec;
  spec.n_tickets = 500;
  auto tickets = testing::synthetic_corpus(spec)->tickets();
  Ticket dup = tickets[42];
  const std::string original = dup.id;
  dup.id = "DUPLICATE";
  tickets.push_back(dup);
  const auto world = full_world(std::make_shared<const Corpus>(tickets), ContentScope::Combined);
  std::string dup_detail;
  bool dup_ok = true;
  for (FeatureSet fs : standard_feature_sets()) {
    const auto hits = world.recommender->cosine_similar(fs, Query::ticket(original), 1);
    const bool ok = hits.size() == 1 && hits[0].ticket_id == "DUPLICATE" && std::abs(hits[0].score - 1.0) <= 1e-6;
    dup_ok = dup_ok && ok;
    dup_detail += std::string(to_string(fs)) + (ok ? " ok " : " WRONG ") +
                  (hits.empty() ? "" : hits[0].ticket_id + "@" + fmt("%.9f", hits[0].score)) + "; ";
  }
  return {bm25_bad == 0 && jaccard_bad == 0 && dup_ok,
          std::to_string(corpora) + " corpora: BM25 off " + std::to_string(bm25_bad) + ", Jaccard off " +
              std::to_string(jaccard_bad) + "; duplicate: " + dup_detail + fmt("%.1f s", clock.seconds())};
}

// ------------------------------------------------------------------ overlap study

Outcome overlap_study() {
  testing::Stopwatch clock;
  bool pass = true;
  std::string detail;
  for (LabelMode mode : {LabelMode::Random, LabelMode::TopicAligned}) {
    SyntheticSpec spec;
    spec.n_tickets = 1000;
    spec.n_categories = 10;
    spec.label_mode = mode;
    const auto world = full_world(testing::synthetic_corpus(spec), ContentScope::Combined);
    const OverlapReport report = world.recommender->category_overlap_study(200, 3, 7);
    detail += mode == LabelMode::Random ? "random labels:" : " topic labels:";
    for (const auto& row : report.rows) {
      detail += " " + row.method + " " + fmt("%.3f", row.mean_shared);
      if (row.method == "naive" || row.method == "mlt") continue;  // baselines, reported only
      pass = pass && (mode == LabelMode::Random ? std::abs(row.mean_shared - 0.3) <= 0.1 : row.mean_shared > 1.5);
    }
    detail += ";";
  }
  return {pass, detail + " " + fmt("%.1f s", clock.seconds())};
}

// ------------------------------------------------------------------ PAM

Outcome pam_optimality() {
  std::size_t equal = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const std::size_t n = 4 + rng.below(7);
    const std::size_t first = 2 + rng.below(n - 3);
    Matrix pts(n, 3);
    for (double& v : pts.data) v = rng.normal();
    for (std::size_t i = 0; i < first; ++i) pts(i, 0) += 10.0;
    const Matrix d = distance_matrix(pts, Distance::Euclidean);
    const double gap = pam(d, 2).cost - oracle::exhaustive_medoid_cost(d, 2);
    worst = std::max(worst, std::abs(gap));
    equal += std::abs(gap) <= 1e-12;
  }
  return {equal == 50, std::to_string(equal) + "/50 two-group instances at the exhaustive optimum, max gap " +
                           fmt("%.1e", worst)};
}

// ------------------------------------------------------------------ graphs

Outcome graph_invariants() {
  SyntheticSpec spec;
  const auto corpus = testing::synthetic_corpus(spec);
  std::size_t owned = 0;
  for (const auto& t : corpus->tickets()) owned += !t.owner.empty();
  UserConsultantOptions opts;
  opts.attach_unassigned = false;
  const std::size_t weight = build_user_consultant_graph(*corpus, opts).total_weight();

  const auto cc = build_consultant_category_graph(*corpus, 200);
  std::map<std::string, double> sums;
  for (const auto& e : cc.edges()) sums[e.source] += e.normalized.value_or(-1.0);
  double worst = 0;
  for (const auto& [c, s] : sums) worst = std::max(worst, std::abs(s - 1.0));
  return {weight == owned && !sums.empty() && worst <= 1e-9,
          "edge weight sum " + std::to_string(weight) + " vs " + std::to_string(owned) + " owned tickets; " +
              std::to_string(sums.size()) + " consultants, max |sum - 1| " + fmt("%.1e", worst)};
}

// ------------------------------------------------------------------ determinism

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (e.is_symlink()) out[rel] = "-> " + fs::read_symlink(e.path()).string();
    else if (e.is_regular_file()) out[rel] = slurp(e.path());
  }
  return out;
}

// gen-corpus, fit all four feature sets, eval, index, ten canned queries.
void run_pipeline(const fs::path& root) {
  PipelineConfig config;
  config.seed = 7;
  config.created_at = "2020-01-01T00:00:00Z";
  SyntheticSpec spec;
  spec.n_tickets = 400;
  spec.seed = 7;
  save_tickets(root / "tickets.jsonl", generate_synthetic_corpus(spec).tickets);
  const auto corpus = std::make_shared<const Corpus>(load_corpus(root / "tickets.jsonl"));
  const ModelStore store(root / "store");
  FitRequest request;
  request.feature_sets = standard_feature_sets();
  write_json_file(root / "fit.json", fit_store(store, *corpus, request, config).to_json());
  EvalConfig eval;
  eval.n_trials = 5;
  for (FeatureSet fs : standard_feature_sets()) evaluate_store(store, *corpus, fs, eval, config);
  build_store_index(store, *corpus, ContentScope::Combined, config);
  const auto rec = open_recommender(store, corpus, ContentScope::Combined, config);
  json answers = json::array();
  for (std::size_t q = 0; q < 10; ++q) {
    const Query query = q % 2 ? Query::ticket(corpus->tickets()[q * 37].id)
                              : Query::free_text(corpus->tickets()[q * 37].subject);
    json entry = json::object();
    for (FeatureSet fs : standard_feature_sets())
      for (const auto& h : rec->cosine_similar(fs, query, 5)) entry[std::string(to_string(fs))].push_back(h.to_json());
    for (const auto& h : rec->more_like_this(query, 5)) entry["mlt"].push_back(h.to_json());
    answers.push_back(entry);
  }
  write_json_file(root / "queries.json", answers);
}

Outcome determinism(const fs::path& first) {
  testing::Stopwatch clock;
  testing::TempDir second;
  run_pipeline(first);
  run_pipeline(second.path());
  const auto a = read_tree(first), b = read_tree(second.path());
  std::size_t json_files = 0, differ = 0;
  for (const auto& [path, bytes] : a) {
    json_files += path.ends_with(".json");
    auto it = b.find(path);
    differ += it == b.end() || it->second != bytes;
  }
  differ += b.size() > a.size() ? b.size() - a.size() : 0;
  return {differ == 0 && json_files > 20, std::to_string(a.size()) + " files (" + std::to_string(json_files) +
                                               " JSON), " + std::to_string(differ) + " differ, " +
                                               fmt("%.1f s", clock.seconds())};
}

// ------------------------------------------------------------------ service

Outcome service_contract(const fs::path& run) {
  const auto corpus = std::make_shared<const Corpus>(load_corpus(run / "tickets.jsonl"));
  PipelineConfig config;
  config.created_at = "2020-01-01T00:00:00Z";
  ClusterParams params;
  cluster_store_words(ModelStore(run / "store"), *corpus, ContentScope::Combined, params, config);
  ServiceOptions options;
  options.config = config;
  options.request_log = [](const json&) {};
  const Service service(run / "store", corpus, options);

  std::size_t checked = 0, invalid = 0;
  std::string first_problem;
  auto check = [&](const HttpRequest& r, const std::string& schema, int status = 200) {
    const HttpResponse resp = service.handle(r);
    ++checked;
    std::vector<std::string> errors;
    if (resp.status != status) errors.push_back("status " + std::to_string(resp.status));
    try {
      const auto more = SchemaValidator::from_file(testing::schema_dir() / (schema + ".json")).validate(json::parse(resp.body));
      errors.insert(errors.end(), more.begin(), more.end());
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
    if (!errors.empty()) {
      ++invalid;
      if (first_problem.empty()) first_problem = r.method + " " + r.path + ": " + errors.front();
    }
    return resp;
  };
  const Ticket& t = corpus->tickets()[5];
  const auto words = ModelStore(run / "store").load_model(ContentScope::Combined, FeatureSet::DocVec, corpus->content_hash());
  check({"GET", "/health", {}, ""}, "health");
  check({"GET", "/tickets/" + t.id, {}, ""}, "ticket");
  check({"POST", "/suggest-category", {}, json{{"subject", t.subject}, {"create_message", t.create_message}}.dump()},
        "suggest-category");
  check({"POST", "/similar", {}, json{{"ticket_id", t.id}}.dump()}, "similar");
  check({"POST", "/similar", {}, json{{"text", t.subject}, {"feature_sets", {"lsa", "naive", "mlt"}}}.dump()}, "similar");
  check({"GET", "/words/similar", {{"w", words.vocabulary().term(0)}}, ""}, "words-similar");
  check({"GET", "/stats/volume", {}, ""}, "stats-volume");
  check({"GET", "/stats/categories", {}, ""}, "stats-categories");
  check({"GET", "/graph", {}, ""}, "graph");
  check({"GET", "/graph", {{"kind", "consultant-category"}, {"min_weight", "10"}}, ""}, "graph");
  check({"GET", "/topics", {}, ""}, "topics");
  check({"GET", "/clusters", {}, ""}, "clusters");
  check({"GET", "/tickets/none", {}, ""}, "error", 404);
  check({"POST", "/similar", {}, "{"}, "error", 400);
  check({"GET", "/similar", {}, ""}, "error", 405);

  // Randomized filtered queries.
  Rng rng(2024);
  std::vector<std::string> owners, requestors, categories;
  for (const auto& tk : corpus->tickets()) {
    if (!tk.owner.empty()) owners.push_back(tk.owner);
    requestors.push_back(tk.requestor);
    categories.insert(categories.end(), tk.categories.begin(), tk.categories.end());
  }
  const char* sets[] = {"lda10", "lda500", "lsa", "docvec", "naive", "mlt"};
  std::size_t violations = 0, hits_seen = 0, answered = 0;
  for (int i = 0; i < 1000; ++i) {
    json filter = json::object();
    if (rng.below(2)) filter["owner"] = owners[rng.below(owners.size())];
    if (rng.below(3) == 0) filter["requestor"] = requestors[rng.below(requestors.size())];
    if (rng.below(2)) filter["categories"] = {categories[rng.below(categories.size())]};
    if (rng.below(2)) filter["date_from"] = "2016-" + std::string(rng.below(2) ? "03" : "09") + "-01";
    if (rng.below(3) == 0) filter["date_to"] = "2018-0" + std::to_string(1 + rng.below(9)) + "-15";
    const Ticket& q = corpus->tickets()[rng.below(corpus->size())];
    json body{{"k", 1 + rng.below(20)}, {"filter", filter}, {"feature_sets", {sets[rng.below(6)], sets[rng.below(6)]}}};
    if (rng.below(4) == 0) body["text"] = q.subject;
    else body["ticket_id"] = q.id;
    const auto resp = check({"POST", "/similar", {}, body.dump()}, "similar");
    if (resp.status != 200) continue;
    ++answered;
    const QueryFilter parsed = QueryFilter::from_json(filter);
    const json answer = json::parse(resp.body);
    for (const auto& entry : answer["results"])
      for (const auto& hit : entry["hits"]) {
        ++hits_seen;
        violations += !parsed.matches(corpus->at(hit["ticket_id"].get<std::string>()));
      }
  }
  return {invalid == 0 && violations == 0 && hits_seen >= 1000,
          std::to_string(checked) + " responses validated, " + std::to_string(invalid) + " invalid" +
              (first_problem.empty() ? "" : " (" + first_problem + ")") + "; " + std::to_string(answered) +
              " filtered queries answered, " + std::to_string(hits_seen) + " hits, " + std::to_string(violations) +
              " filter violations"};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by name substring.
  const std::vector<std::string> only(argv + 1, argv + argc);
  testing::TempDir pipeline_run;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cleaning golden suite", cleaning_golden},
      {"stemmer conformance", stemmer_conformance},
      {"LDA topic recovery", lda_recovery},
      {"LSA subspace oracle", lsa_oracle},
      {"classifier pipeline", classifier_pipeline},
      {"metrics oracle", metrics_oracle},
      {"recommender oracles", recommender_oracles},
      {"category-overlap study", overlap_study},
      {"PAM optimality", pam_optimality},
      {"graph invariants", graph_invariants},
      {"pipeline determinism", [&] { return determinism(pipeline_run.path()); }},
      {"service contract", [&] { return service_contract(pipeline_run.path()); }},
  };
  std::size_t failed = 0;
  std::size_t ran = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& o) { return name.find(o) != std::string::npos; }))
      continue;
    ++ran;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, "threw: " + describe_exception(e)};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
