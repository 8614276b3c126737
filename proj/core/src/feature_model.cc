#include "ticketscope/feature_model.h"

#include "ticketscope/error.h"

namespace ticketscope {

std::string_view to_string(FeatureSet f) {
  switch (f) {
    case FeatureSet::Lda10: return "lda10";
    case FeatureSet::Lda500: return "lda500";
    case FeatureSet::Lsa: return "lsa";
    case FeatureSet::DocVec: return "docvec";
    case FeatureSet::Lda10Labeling: return "lda10-labeling";
  }
  return "?";
}

FeatureSet feature_set_from_string(std::string_view s) {
  for (FeatureSet f : {FeatureSet::Lda10, FeatureSet::Lda500, FeatureSet::Lsa, FeatureSet::DocVec,
                       FeatureSet::Lda10Labeling})
    if (to_string(f) == s) return f;
  throw InvalidInput("unknown feature set '" + std::string(s) +
                     "' (expected lda10, lda500, lsa, docvec or lda10-labeling)");
}

const std::vector<FeatureSet>& standard_feature_sets() {
  static const std::vector<FeatureSet> sets{FeatureSet::Lda10, FeatureSet::Lda500, FeatureSet::Lsa,
                                            FeatureSet::DocVec};
  return sets;
}

namespace {

bool is_lda(FeatureSet f) {
  return f == FeatureSet::Lda10 || f == FeatureSet::Lda500 || f == FeatureSet::Lda10Labeling;
}

}  // namespace

FeatureSpec FeatureSpec::defaults(FeatureSet id) {
  FeatureSpec s;
  s.id = id;
  s.prep.pattern = textprep::TokenPattern::AlnumWithPaths;
  s.prep.remove_stopwords = true;
  switch (id) {
    case FeatureSet::Lda10: s.lda = LdaConfig::preset("lda10-features"); break;
    case FeatureSet::Lda500: s.lda = LdaConfig::preset("lda500"); break;
    case FeatureSet::Lda10Labeling:
      s.lda = LdaConfig::preset("lda10-labeling");
      s.prep.pattern = textprep::TokenPattern::AlphaOnly;
      break;
    case FeatureSet::Lsa: break;
    case FeatureSet::DocVec: s.prep.remove_stopwords = false; break;
  }
  return s;
}

FeatureSpec& FeatureSpec::with_seed(std::uint64_t seed) {
  lda.seed = seed;
  lsa.svd.seed = seed;
  embedding.seed = seed;
  return *this;
}

nlohmann::json FeatureSpec::to_json() const {
  nlohmann::json j{{"feature_set", std::string(to_string(id))}, {"prep", prep.to_json()}};
  if (is_lda(id)) {
    j["min_count"] = min_count;
    j["lda"] = lda.to_json();
  } else if (id == FeatureSet::Lsa) {
    j["min_count"] = min_count;
    j["lsa"] = lsa.to_json();
  } else {
    j["embedding"] = embedding.to_json();
  }
  return j;
}

FeatureSpec FeatureSpec::from_json(const nlohmann::json& j) {
  FeatureSpec s = defaults(feature_set_from_string(j.at("feature_set").get<std::string>()));
  for (const auto& [key, value] : j.items()) {
    if (key == "feature_set") continue;
    if (key == "prep") s.prep = textprep::DocPrep::from_json(value);
    else if (key == "min_count") s.min_count = value.get<std::size_t>();
    else if (key == "lda") s.lda = LdaConfig::from_json(value);
    else if (key == "lsa") s.lsa = LsaConfig::from_json(value);
    else if (key == "embedding") s.embedding = EmbeddingConfig::from_json(value);
    else throw InvalidInput("unknown feature spec key '" + key + "'");
  }
  return s;
}

FeatureModel FeatureModel::fit(const FeatureSpec& spec, const Docs& token_docs) {
  FeatureModel m;
  m.spec_ = spec;
  if (spec.id == FeatureSet::DocVec) {
    m.model_ = EmbeddingModel::fit(token_docs, spec.embedding);
    return m;
  }
  m.vocab_ = Vocabulary::build(token_docs, spec.min_count);
  if (m.vocab_.empty()) throw InvalidInput(std::string(to_string(spec.id)) + ": empty vocabulary");
  EncodedDocs encoded;
  encoded.reserve(token_docs.size());
  for (const auto& d : token_docs) encoded.push_back(m.vocab_.encode(d));
  if (spec.id == FeatureSet::Lsa)
    m.model_ = LsaModel::fit(encoded, m.vocab_.size(), spec.lsa);
  else
    m.model_ = LdaModel::fit(encoded, m.vocab_.size(), spec.lda);
  return m;
}

std::size_t FeatureModel::dimension() const {
  if (auto* p = lda()) return p->n_topics();
  if (auto* p = lsa()) return p->dimension();
  if (auto* p = embedding()) return p->dimension();
  return 0;
}

const Vocabulary& FeatureModel::vocabulary() const {
  if (auto* p = embedding()) return p->vocabulary();
  return vocab_;
}

FeatureVector FeatureModel::transform(const std::vector<std::string>& tokens) const {
  if (auto* p = lda()) {
    auto r = p->infer(vocab_.encode(tokens));
    return {std::move(r.proportions), r.degenerate};
  }
  if (auto* p = lsa()) {
    auto r = p->project(vocab_.encode(tokens));
    return {std::move(r.values), r.degenerate};
  }
  if (auto* p = embedding()) {
    auto r = p->infer(tokens);
    return {std::move(r.values), r.degenerate};
  }
  throw Error("feature model is not fitted");
}

void FeatureModel::save(const std::filesystem::path& dir, ArtifactManifest manifest) const {
  std::filesystem::create_directories(dir);
  manifest.kind = "feature_model";
  manifest.feature_set = std::string(to_string(id()));
  manifest.hyperparameters = spec_.to_json();
  manifest.vocab_hash = vocab_hash();
  if (auto* p = lda()) {
    manifest.seed = p->config().seed;
    p->save(dir);
  } else if (auto* p = lsa()) {
    manifest.seed = p->config().svd.seed;
    p->save(dir);
  } else if (auto* p = embedding()) {
    manifest.seed = p->config().seed;
    p->save(dir);
  } else {
    throw Error("feature model is not fitted");
  }
  if (!embedding()) write_json_file(dir / "vocab.json", vocab_.to_json());
  write_manifest(dir, manifest);
}

FeatureModel FeatureModel::load(const std::filesystem::path& dir) {
  const ArtifactManifest manifest = read_manifest(dir);
  if (manifest.kind != "feature_model")
    throw Error(dir.string() + " holds a '" + manifest.kind + "' artifact, not a feature model");
  FeatureModel m;
  try {
    m.spec_ = FeatureSpec::from_json(manifest.hyperparameters);
    if (m.spec_.id == FeatureSet::DocVec) {
      m.model_ = EmbeddingModel::load(dir);
    } else {
      m.vocab_ = Vocabulary::from_json(read_json_file(dir / "vocab.json"));
      if (m.spec_.id == FeatureSet::Lsa)
        m.model_ = LsaModel::load(dir);
      else
        m.model_ = LdaModel::load(dir);
    }
  } catch (...) {
    std::throw_with_nested(Error("cannot load feature model from " + dir.string()));
  }
  if (m.vocab_hash() != manifest.vocab_hash)
    throw Error("vocabulary in " + dir.string() + " does not match its manifest hash");
  return m;
}

}  // namespace ticketscope
