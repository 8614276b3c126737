#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.h"
#include "test_support.h"
#include "ticketscope/error.h"
#include "ticketscope/recommend.h"
#include "ticketscope/textprep.h"
#include "ticketscope/util.h"

namespace ticketscope {
namespace {

// Random corpora over a small alphabet of words that cleaning leaves alone.
const std::vector<std::string> kWords{"bafu", "keloz", "mirat", "dovu", "sapet", "gunok", "lirva", "tozam"};

oracle::TokenDocs random_token_docs(std::size_t n, Rng& rng) {
  oracle::TokenDocs docs(n);
  for (auto& d : docs) {
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) d.push_back(kWords[rng.below(kWords.size())]);
  }
  return docs;
}

std::vector<std::string> ids_for(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("D" + std::to_string(100 + i));
  return ids;
}

TEST(Bm25, MatchesBruteForceOracle) {
  Rng rng(17);
  for (int corpus = 0; corpus < 60; ++corpus) {
    const std::size_t n = 1 + rng.below(50);
    const auto docs = random_token_docs(n, rng);
    const auto ids = ids_for(n);
    const auto index = LexicalIndex::build(ids, docs);
    for (int q = 0; q < 10; ++q) {
      std::vector<std::string> terms;
      for (const auto& w : kWords)
        if (rng.uniform() < 0.4) terms.push_back(w);
      const auto expected = oracle::bm25(docs, terms);
      std::vector<double> got(n, 0.0);
      std::set<std::size_t> seen;
      for (const auto& [doc, score] : index.bm25(terms)) {
        got[doc] = score;
        seen.insert(doc);
      }
      for (std::size_t d = 0; d < n; ++d) {
        ASSERT_NEAR(got[d], expected[d], 1e-12);
        ASSERT_EQ(seen.contains(d), expected[d] > 0.0);
      }
    }
  }
}

TEST(Bm25, IdfAndTermSelection) {
  const oracle::TokenDocs docs{{"bafu", "keloz"}, {"bafu"}, {"mirat", "mirat"}};
  const auto index = LexicalIndex::build(ids_for(3), docs);
  EXPECT_DOUBLE_EQ(index.idf("bafu"), std::log(1.0 + (3 - 2 + 0.5) / (2 + 0.5)));
  EXPECT_EQ(index.df("zzz"), 0u);
  EXPECT_EQ(index.select_terms({{"bafu", 1}, {"mirat", 1}, {"zzz", 9}}, 5),
            (std::vector<std::string>{"mirat", "bafu"}));
  EXPECT_EQ(index.select_terms({{"bafu", 1}, {"mirat", 1}}, 1), std::vector<std::string>{"mirat"});
  EXPECT_DOUBLE_EQ(index.average_length(), 5.0 / 3.0);
  EXPECT_EQ(LexicalIndex::from_json(index.to_json()).to_json(), index.to_json());
}

Ticket word_ticket(const std::string& id, const std::vector<std::string>& words) {
  Ticket t;
  t.id = id;
  t.created = parse_utc_timestamp("2018-01-01T00:00:00Z");
  t.status = Status::Resolved;
  t.requestor = "u1";
  t.owner = "c1";
  t.categories = {"x"};
  t.create_message = join(words, " ");
  return t;
}

TEST(Recommender, LexicalMethodsMatchOracles) {
  Rng rng(23);
  for (int round = 0; round < 25; ++round) {
    const std::size_t n = 2 + rng.below(49);
    const auto docs = random_token_docs(n, rng);
    const auto ids = ids_for(n);
    std::vector<Ticket> tickets;
    for (std::size_t i = 0; i < n; ++i) tickets.push_back(word_ticket(ids[i], docs[i]));
    const auto world = testing::build_world(std::make_shared<const Corpus>(tickets), ContentScope::Combined, {});
    const auto& rec = *world.recommender;

    for (std::size_t qi = 0; qi < n; ++qi) {
      // Jaccard over unique tokens.
      std::vector<std::pair<std::string, double>> expect;
      for (std::size_t d = 0; d < n; ++d)
        if (d != qi) expect.emplace_back(ids[d], oracle::jaccard(docs[qi], docs[d]));
      expect = oracle::ranked(expect);
      const auto hits = rec.naive_overlap(Query::ticket(ids[qi]), n);
      ASSERT_EQ(hits.size(), expect.size());
      for (std::size_t r = 0; r < hits.size(); ++r) {
        ASSERT_EQ(hits[r].ticket_id, expect[r].first);
        ASSERT_DOUBLE_EQ(hits[r].score, expect[r].second);
        ASSERT_GE(hits[r].score, 0.0);
        ASSERT_LE(hits[r].score, 1.0);
      }

      // More-like-this with every query term selected is plain BM25.
      const std::set<std::string> unique(docs[qi].begin(), docs[qi].end());
      const auto scores = oracle::bm25(docs, {unique.begin(), unique.end()});
      std::vector<std::pair<std::string, double>> bm;
      for (std::size_t d = 0; d < n; ++d)
        if (d != qi && scores[d] > 0) bm.emplace_back(ids[d], scores[d]);
      bm = oracle::ranked(bm);
      const auto mlt = rec.more_like_this(Query::ticket(ids[qi]), n, {}, 100);
      ASSERT_EQ(mlt.size(), bm.size());
      std::map<std::string, double> expected_score(bm.begin(), bm.end());
      for (std::size_t r = 0; r < mlt.size(); ++r) {
        ASSERT_NEAR(mlt[r].score, bm[r].second, 1e-12);
        // A different id at this rank is only acceptable for a numerical tie.
        if (mlt[r].ticket_id != bm[r].first)
          ASSERT_NEAR(expected_score.at(mlt[r].ticket_id), bm[r].second, 1e-12);
      }
    }
  }
}

TEST(Recommender, JaccardIsOneOnlyForEqualTokenSets) {
  std::vector<Ticket> tickets{word_ticket("A", {"bafu", "keloz", "bafu"}), word_ticket("B", {"keloz", "bafu"}),
                              word_ticket("C", {"keloz", "bafu", "dovu"})};
  const auto world = testing::build_world(std::make_shared<const Corpus>(tickets), ContentScope::Combined, {});
  const auto hits = world.recommender->naive_overlap(Query::ticket("A"), 5);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].ticket_id, "B");
  EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
  EXPECT_DOUBLE_EQ(hits[1].score, 2.0 / 3.0);
  EXPECT_THROW(world.recommender->naive_overlap(Query::ticket("nope"), 3), NotFound);
  EXPECT_THROW(world.recommender->naive_overlap(Query::free_text("the of and"), 3), DegenerateQuery);
}

class RecommenderWorld : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SyntheticSpec spec;
    spec.n_tickets = 300;
    spec.n_categories = 5;
    world_ = new testing::World(testing::build_world(testing::synthetic_corpus(spec), ContentScope::Combined));
  }
  static void TearDownTestSuite() { delete world_; }
  static testing::World* world_;
};
testing::World* RecommenderWorld::world_ = nullptr;

TEST_F(RecommenderWorld, CosineIsSymmetricAndSelfRanksFirst) {
  const auto& rec = *world_->recommender;
  for (FeatureSet fs : standard_feature_sets()) {
    const auto& vi = world_->index->vectors.at(fs);
    for (std::size_t r = 0; r < vi.size(); r += 37) {
      const std::string& id = vi.ids()[r];
      const auto self = rec.cosine_similar(fs, Query::ticket(id), 1, {}, false);
      ASSERT_EQ(self.size(), 1u);
      EXPECT_NEAR(self[0].score, 1.0, 1e-9) << to_string(fs);
      if (self[0].ticket_id != id) EXPECT_NEAR(self[0].score, 1.0, 1e-12);

      const auto hits = rec.cosine_similar(fs, Query::ticket(id), 5);
      for (const auto& h : hits) {
        EXPECT_NE(h.ticket_id, id);
        const auto back = rec.cosine_similar(fs, Query::ticket(h.ticket_id), vi.size(), {}, false);
        const auto it = std::find_if(back.begin(), back.end(), [&](const SimilarHit& x) { return x.ticket_id == id; });
        ASSERT_NE(it, back.end());
        EXPECT_NEAR(it->score, h.score, 1e-9);
      }
      for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_GE(hits[i - 1].score, hits[i].score);
    }
  }
}

TEST_F(RecommenderWorld, FiltersOnlyRestrict) {
  const auto& rec = *world_->recommender;
  const auto& corpus = *world_->corpus;
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    const Ticket& q = corpus.tickets()[rng.below(corpus.size())];
    QueryFilter f;
    if (rng.uniform() < 0.5) f.owner = "c0" + std::to_string(1 + rng.below(8));
    if (rng.uniform() < 0.5) f.categories = {"Category-0" + std::to_string(1 + rng.below(5))};
    if (rng.uniform() < 0.5) f.date_from = parse_utc_timestamp("2018-01-01T00:00:00Z");
    if (rng.uniform() < 0.3) f.date_to = parse_utc_timestamp("2018-12-31T23:59:59Z");
    for (FeatureSet fs : standard_feature_sets()) {
      std::vector<SimilarHit> all, filtered;
      try {
        all = rec.cosine_similar(fs, Query::ticket(q.id), corpus.size());
        filtered = rec.cosine_similar(fs, Query::ticket(q.id), corpus.size(), f);
      } catch (const DegenerateQuery&) {
        continue;
      }
      std::set<std::string> pool;
      for (const auto& h : all) pool.insert(h.ticket_id);
      for (const auto& h : filtered) {
        ASSERT_TRUE(f.matches(corpus.at(h.ticket_id)));
        ASSERT_TRUE(pool.contains(h.ticket_id));
      }
    }
    for (const auto& h : rec.more_like_this(Query::ticket(q.id), 20, f)) ASSERT_TRUE(f.matches(corpus.at(h.ticket_id)));
    for (const auto& h : rec.naive_overlap(Query::ticket(q.id), 20, f)) ASSERT_TRUE(f.matches(corpus.at(h.ticket_id)));
  }
}

TEST_F(RecommenderWorld, FreeTextAndDegenerateQueries) {
  const auto& rec = *world_->recommender;
  const Ticket& t = world_->corpus->tickets()[3];
  const auto text = *scope_text(t, ContentScope::Combined);
  for (FeatureSet fs : standard_feature_sets()) {
    const auto hits = rec.cosine_similar(fs, Query::free_text(text), 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].feature_set, to_string(fs));
    EXPECT_THROW(rec.cosine_similar(fs, Query::free_text("the and of"), 3), DegenerateQuery);
  }
  EXPECT_THROW(rec.cosine_similar(FeatureSet::Lsa, Query{}, 3), InvalidInput);
  EXPECT_THROW(rec.cosine_similar(FeatureSet::Lsa, Query::ticket("T99999"), 3), NotFound);
  EXPECT_THROW(rec.cosine_similar(FeatureSet::Lda10Labeling, Query::ticket(t.id), 3), NotFound);
}

TEST_F(RecommenderWorld, OverlapStudyAndTemplateScan) {
  const auto& rec = *world_->recommender;
  const auto report = rec.category_overlap_study(50, 3, 7);
  EXPECT_EQ(report.sample_size, 50u);
  ASSERT_EQ(report.rows.size(), 6u);
  for (const auto& row : report.rows) {
    EXPECT_GE(row.mean_shared, 0.0);
    EXPECT_LE(row.mean_shared, 3.0);
  }
  EXPECT_EQ(rec.category_overlap_study(50, 3, 7).to_json(), report.to_json());

  const Ticket& t = world_->corpus->tickets()[10];
  // Trailing space: the symbol pattern only drops a period followed by whitespace,
  // as it is inside the combined ticket text.
  const auto scan = rec.template_scan({{"copy", t.subject + " " + t.create_message + " "}, {"empty", "the of"}}, 3);
  ASSERT_EQ(scan.templates.size(), 2u);
  EXPECT_TRUE(scan.templates[0].flagged);
  // The source ticket is among the top hits and contains every template token.
  const auto& hits = scan.templates[0].hits;
  const auto self = std::find_if(hits.begin(), hits.end(), [&](const auto& h) { return h.ticket_id == t.id; });
  ASSERT_NE(self, hits.end());
  EXPECT_DOUBLE_EQ(self->containment, 1.0);
  EXPECT_TRUE(scan.templates[1].skipped);
  EXPECT_EQ(scan.flagged_count(), 1u);
}

TEST_F(RecommenderWorld, IndexPersistence) {
  testing::TempDir dir;
  ArtifactManifest m;
  m.created_at = "2026-01-01T00:00:00Z";
  world_->index->save(dir.path(), m);
  const auto back = IndexSet::load(dir.path());
  EXPECT_EQ(back.vectors.size(), world_->index->vectors.size());
  for (const auto& [fs, vi] : world_->index->vectors) {
    EXPECT_EQ(back.vectors.at(fs).ids(), vi.ids());
    EXPECT_EQ(back.vectors.at(fs).vectors(), vi.vectors());
  }
  EXPECT_EQ(back.snippets, world_->index->snippets);
  EXPECT_EQ(back.lexical.to_json(), world_->index->lexical.to_json());
}

TEST(QueryFilter, JsonParsing) {
  const auto f = QueryFilter::from_json(
      {{"date_from", "2018-01-01"}, {"date_to", "2018-01-31"}, {"owner", "c1"}, {"categories", {"a", "b"}}});
  EXPECT_EQ(format_utc_timestamp(*f.date_to), "2018-01-31T23:59:59Z");
  Ticket t;
  t.created = parse_utc_timestamp("2018-01-31T12:00:00Z");
  t.owner = "c1";
  t.categories = {"b"};
  EXPECT_TRUE(f.matches(t));
  t.categories = {"c"};
  EXPECT_FALSE(f.matches(t));
  EXPECT_THROW(QueryFilter::from_json({{"colour", "red"}}), InvalidInput);
  EXPECT_THROW(QueryFilter::from_json({{"date_from", "2018-01-01T00:00:00"}}), InvalidInput);
  EXPECT_TRUE(QueryFilter::from_json(nullptr).empty());
  EXPECT_EQ(QueryFilter::from_json(f.to_json()).to_json(), f.to_json());
}

}  // namespace
}  // namespace ticketscope
