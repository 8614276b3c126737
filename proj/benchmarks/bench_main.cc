#include <benchmark/benchmark.h>

#include "ticketscope/feature_model.h"
#include "ticketscope/lsa.h"
#include "ticketscope/pipeline.h"
#include "ticketscope/recommend.h"
#include "ticketscope/stemmer.h"
#include "ticketscope/synthetic.h"
#include "ticketscope/textprep.h"
#include "ticketscope/util.h"

using namespace ticketscope;

namespace {

const SyntheticCorpus& corpus_of(std::size_t n) {
  static std::map<std::size_t, SyntheticCorpus> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    SyntheticSpec spec;
    spec.n_tickets = n;
    it = cache.emplace(n, generate_synthetic_corpus(spec)).first;
  }
  return it->second;
}

std::vector<std::vector<std::string>> token_docs(const Corpus& corpus, const FeatureSpec& spec) {
  return scope_tokens(clean_scope(corpus, ContentScope::Combined, {}), spec.prep, {});
}

void BM_Clean(benchmark::State& state) {
  const auto& tickets = corpus_of(500).tickets;
  std::size_t bytes = 0;
  for (auto _ : state)
    for (const auto& t : tickets) {
      const std::string text = t.content;
      bytes += text.size();
      benchmark::DoNotOptimize(textprep::clean(text));
    }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Clean)->Unit(benchmark::kMillisecond);

void BM_Stem(benchmark::State& state) {
  const std::vector<std::string> words{"connection", "generously", "relational", "troubleshooting", "printers",
                                       "authentication", "happily", "configured", "restarting", "disks"};
  for (auto _ : state)
    for (const auto& w : words) benchmark::DoNotOptimize(porter2_stem(w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_Stem);

void BM_FitFeatureModel(benchmark::State& state) {
  const auto fs = static_cast<FeatureSet>(state.range(0));
  const Corpus corpus(corpus_of(500).tickets);
  FeatureSpec spec = FeatureSpec::defaults(fs);
  spec.lda.iterations = 100;
  const auto docs = token_docs(corpus, spec);
  for (auto _ : state) benchmark::DoNotOptimize(FeatureModel::fit(spec, docs));
  state.SetLabel(std::string(to_string(fs)));
}
BENCHMARK(BM_FitFeatureModel)
    ->Arg(static_cast<int>(FeatureSet::Lda10))
    ->Arg(static_cast<int>(FeatureSet::Lsa))
    ->Arg(static_cast<int>(FeatureSet::DocVec))
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

void BM_TruncatedSvd(benchmark::State& state) {
  Rng rng(3);
  const auto rows = state.range(0);
  Eigen::SparseMatrix<double> m(rows, rows / 2);
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (int j = 0; j < 8; ++j)
      entries.emplace_back(i, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(rows / 2))), rng.uniform());
  m.setFromTriplets(entries.begin(), entries.end());
  for (auto _ : state) benchmark::DoNotOptimize(truncated_svd(m, 100, {}));
}
BENCHMARK(BM_TruncatedSvd)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_Bm25(benchmark::State& state) {
  const Corpus corpus(corpus_of(2000).tickets);
  const auto docs = token_docs(corpus, FeatureSpec::defaults(FeatureSet::Lsa));
  std::vector<std::string> ids;
  for (const auto& t : corpus.tickets()) ids.push_back(t.id);
  const LexicalIndex index = LexicalIndex::build(ids, docs);
  std::size_t q = 0;
  for (auto _ : state) {
    const auto& doc = docs[q++ % docs.size()];
    std::vector<std::string> terms(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(doc.size(), 25)));
    benchmark::DoNotOptimize(index.bm25(terms));
  }
}
BENCHMARK(BM_Bm25)->Unit(benchmark::kMicrosecond);

void BM_CosineSimilar(benchmark::State& state) {
  auto corpus = std::make_shared<const Corpus>(corpus_of(2000).tickets);
  FeatureSpec spec = FeatureSpec::defaults(FeatureSet::Lsa);
  auto model = std::make_shared<const FeatureModel>(FeatureModel::fit(spec, token_docs(*corpus, spec)));
  auto index = std::make_shared<const IndexSet>(build_index(*corpus, ContentScope::Combined, {model.get()}, {}));
  const Recommender rec(corpus, index, {{FeatureSet::Lsa, model}}, IndexOptions{});
  std::size_t q = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(rec.cosine_similar(FeatureSet::Lsa, Query::ticket(corpus->tickets()[q++ % corpus->size()].id), 10));
}
BENCHMARK(BM_CosineSimilar)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
