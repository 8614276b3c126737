#include <gtest/gtest.h>

#include <map>
#include <set>

#include "test_support.h"
#include "ticketscope/community.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {
namespace {

Ticket ticket(std::string id, std::string requestor, std::string owner, std::vector<std::string> cats) {
  Ticket t;
  t.id = std::move(id);
  t.created = parse_utc_timestamp("2018-05-01T00:00:00Z");
  t.requestor = std::move(requestor);
  t.owner = std::move(owner);
  t.categories = std::move(cats);
  return t;
}

Corpus small_corpus() {
  return Corpus({ticket("1", "u1", "c1", {"Storage"}), ticket("2", "u1", "c1", {"Storage", "Python"}),
                 ticket("3", "u2", "c1", {"Python"}), ticket("4", "u2", "c2", {"Storage"}),
                 ticket("5", "u3", "", {"Storage"}), ticket("6", "u3", "c2", {"Accounts"})});
}

TEST(UserConsultantGraph, HandWorkedExample) {
  const auto g = build_user_consultant_graph(small_corpus());
  EXPECT_EQ(g.kind, "user-consultant");
  const std::vector<GraphEdge> expected{
      {"user:u1", "consultant:c1", 2, std::nullopt}, {"user:u2", "consultant:c1", 1, std::nullopt},
      {"user:u2", "consultant:c2", 1, std::nullopt}, {"user:u3", "consultant:c2", 1, std::nullopt},
      {"user:u3", "consultant:unassigned", 1, std::nullopt}};
  auto sorted = expected;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return std::tie(a.source, a.target) < std::tie(b.source, b.target); });
  EXPECT_EQ(g.edges(), sorted);
  EXPECT_EQ(g.total_weight(), 6u);

  UserConsultantOptions opts;
  opts.attach_unassigned = false;
  EXPECT_EQ(build_user_consultant_graph(small_corpus(), opts).total_weight(), 5u);
  opts.min_edge_weight = 2;
  EXPECT_EQ(build_user_consultant_graph(small_corpus(), opts).edges().size(), 1u);
}

TEST(UserConsultantGraph, WeightSumEqualsOwnedTickets) {
  SyntheticSpec spec;
  spec.n_tickets = 800;
  const auto corpus = testing::synthetic_corpus(spec);
  std::size_t owned = 0;
  for (const auto& t : corpus->tickets()) owned += !t.owner.empty();
  UserConsultantOptions opts;
  opts.attach_unassigned = false;
  EXPECT_EQ(build_user_consultant_graph(*corpus, opts).total_weight(), owned);

  // With unowned tickets attached, the real-consultant edges still sum to the owned count.
  const auto g = build_user_consultant_graph(*corpus);
  std::size_t to_consultants = 0;
  for (const auto& e : g.edges()) to_consultants += e.target != kUnassignedNode ? e.weight : 0;
  EXPECT_EQ(to_consultants, owned);
  EXPECT_EQ(g.total_weight(), corpus->size());

  opts.include_machines = true;
  const auto with_machines = build_user_consultant_graph(*corpus, opts);
  std::size_t machine_weight = 0, machine_tickets = 0;
  for (const auto& e : with_machines.edges()) machine_weight += e.target.starts_with("machine:") ? e.weight : 0;
  for (const auto& t : corpus->tickets()) machine_tickets += t.machine.has_value();
  EXPECT_EQ(machine_weight, machine_tickets);
}

TEST(ConsultantCategoryGraph, NormalizedWeightsSumToOne) {
  const auto g = build_consultant_category_graph(small_corpus(), 2);
  // Accounts (1 ticket) is dropped; Storage has 4 tickets, Python 2.
  std::map<std::string, double> sums;
  for (const auto& e : g.edges()) {
    ASSERT_TRUE(e.normalized.has_value());
    sums[e.source] += *e.normalized;
    EXPECT_NE(e.target, "category:Accounts");
  }
  EXPECT_EQ(sums.size(), 2u);
  for (const auto& [c, s] : sums) EXPECT_NEAR(s, 1.0, 1e-9) << c;
  const std::vector<GraphEdge> expect{{"consultant:c1", "category:Python", 2, 0.5},
                                      {"consultant:c1", "category:Storage", 2, 0.5},
                                      {"consultant:c2", "category:Storage", 1, 1.0}};
  EXPECT_EQ(g.edges(), expect);
}

TEST(ConsultantCategoryGraph, ScaleExactNormalization) {
  SyntheticSpec spec;
  spec.n_tickets = 600;
  const auto corpus = testing::synthetic_corpus(spec);
  const auto base = build_consultant_category_graph(*corpus, 20);
  std::map<std::string, double> sums;
  for (const auto& e : base.edges()) sums[e.source] += *e.normalized;
  for (const auto& [c, s] : sums) EXPECT_NEAR(s, 1.0, 1e-9) << c;

  // Every ticket three times over: counts triple, normalized weights stay put.
  std::vector<Ticket> tripled;
  for (int copy = 0; copy < 3; ++copy)
    for (Ticket t : corpus->tickets()) {
      t.id += "-" + std::to_string(copy);
      tripled.push_back(std::move(t));
    }
  const auto scaled = build_consultant_category_graph(Corpus(std::move(tripled)), 60);
  ASSERT_EQ(scaled.edges().size(), base.edges().size());
  for (std::size_t i = 0; i < base.edges().size(); ++i) {
    EXPECT_EQ(scaled.edges()[i].weight, 3 * base.edges()[i].weight);
    EXPECT_EQ(*scaled.edges()[i].normalized, *base.edges()[i].normalized);
  }
}

TEST(Subgraph, EdgesAreASubsetWithSameWeights) {
  SyntheticSpec spec;
  spec.n_tickets = 500;
  const auto g = build_user_consultant_graph(*testing::synthetic_corpus(spec));
  for (std::size_t radius : {0u, 1u, 2u}) {
    const auto sub = subgraph(g, "u03", radius);
    EXPECT_TRUE(sub.has_node("user:u03"));
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : sub.edges()) {
      EXPECT_NE(std::find(g.edges().begin(), g.edges().end(), e), g.edges().end());
      seen.insert({e.source, e.target});
    }
    if (radius == 0) EXPECT_TRUE(sub.edges().empty());
    if (radius == 1)
      for (const auto& [id, kind] : sub.nodes()) EXPECT_TRUE(id == "user:u03" || kind == NodeKind::Consultant);
  }
  EXPECT_THROW(subgraph(g, "nobody", 1), NotFound);
}

TEST(Graph, ResolveAndSerialize) {
  CommunityGraph g;
  g.kind = "user-consultant";
  g.add_node("user:x", NodeKind::User);
  g.add_node("consultant:x", NodeKind::Consultant);
  g.add_node("user:y", NodeKind::User);
  EXPECT_EQ(g.resolve("y"), "user:y");
  EXPECT_EQ(g.resolve("consultant:x"), "consultant:x");
  EXPECT_THROW(g.resolve("x"), InvalidInput);
  EXPECT_THROW(g.resolve("z"), NotFound);
  EXPECT_THROW(g.add_edge({"user:y", "consultant:z", 1, std::nullopt}), InvalidInput);
  g.add_edge({"user:y", "consultant:x", 3, std::nullopt});
  const auto j = g.to_json();
  EXPECT_EQ(j.at("nodes").size(), 3u);
  EXPECT_EQ(j.at("edges")[0].at("weight"), 3);
  EXPECT_FALSE(j.at("edges")[0].contains("normalized_weight"));
  EXPECT_NE(g.to_dot().find("\"user:y\" -- \"consultant:x\" [weight=3]"), std::string::npos);
}

}  // namespace
}  // namespace ticketscope
