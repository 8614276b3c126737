#include "ticketscope/lda.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ticketscope/blob.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

LdaConfig LdaConfig::preset(std::string_view name) {
  LdaConfig c;
  if (name == "lda10-features") {
    c.n_topics = 10, c.alpha = 10.0, c.beta = 0.005, c.iterations = 1000;
  } else if (name == "lda10-labeling") {
    c.n_topics = 10, c.alpha = 10.0, c.beta = 1.0, c.iterations = 2000;
  } else if (name == "lda500") {
    c.n_topics = 500, c.alpha = 0.01, c.beta = 0.005, c.iterations = 1000;
  } else {
    throw InvalidInput("unknown LDA preset '" + std::string(name) + "'");
  }
  return c;
}

nlohmann::json LdaConfig::to_json() const {
  return {{"n_topics", n_topics},
          {"alpha", alpha},
          {"beta", beta},
          {"iterations", iterations},
          {"infer_iterations", infer_iterations},
          {"infer_burn_in", infer_burn_in},
          {"seed", seed}};
}

LdaConfig LdaConfig::from_json(const nlohmann::json& j) {
  LdaConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_topics") c.n_topics = value.get<std::size_t>();
    else if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "beta") c.beta = value.get<double>();
    else if (key == "iterations") c.iterations = value.get<std::size_t>();
    else if (key == "infer_iterations") c.infer_iterations = value.get<std::size_t>();
    else if (key == "infer_burn_in") c.infer_burn_in = value.get<std::size_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw InvalidInput("unknown LDA option '" + key + "'");
  }
  return c;
}

void LdaConfig::validate() const {
  if (n_topics < 2) throw InvalidInput("LDA needs at least 2 topics");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("LDA alpha and beta must be positive");
  if (infer_iterations == 0 || infer_burn_in >= infer_iterations)
    throw InvalidInput("LDA infer_burn_in must be smaller than infer_iterations");
}

namespace {

// Collapsed Gibbs state. p(z=k) is split into
//   s_k = alpha beta / (beta V + n_k)
//   r_k = beta n_dk / (beta V + n_k)          (topics present in the doc)
//   q_k = (alpha + n_dk) n_wk / (beta V + n_k) (topics present for the word)
// so each draw only touches the doc's and the word's non-zero topics.
class SparseSampler {
 public:
  SparseSampler(const EncodedDocs& docs, std::size_t V, const LdaConfig& cfg, Rng& rng)
      : docs_(docs), K_(cfg.n_topics), V_(V), alpha_(cfg.alpha), beta_(cfg.beta),
        beta_v_(cfg.beta * static_cast<double>(V)), nwk_(V * K_, 0), word_pos_(V * K_, 0),
        word_nz_(V), nk_(K_, 0), doc_count_(K_, 0), doc_pos_(K_, 0), coef_(K_), q_buf_(K_) {
    z_.resize(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
      z_[d].resize(docs[d].size());
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const auto k = static_cast<std::uint32_t>(rng.below(K_));
        z_[d][i] = k;
        inc_word(docs[d][i], k);
        ++nk_[k];
      }
    }
  }

  void sweep(Rng& rng) {
    reset_smoothing();
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      enter_doc(d);
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const std::uint32_t w = docs_[d][i];
        remove(w, z_[d][i]);
        const std::uint32_t k = draw(w, rng);
        add(w, k);
        z_[d][i] = k;
      }
      leave_doc();
    }
  }

  // Per-topic masses reassembled from the buckets, for the token at (d, i).
  std::vector<double> bucket_masses(std::size_t d, std::size_t i) {
    reset_smoothing();
    enter_doc(d);
    const std::uint32_t w = docs_[d][i];
    const std::uint32_t old = z_[d][i];
    remove(w, old);
    std::vector<double> mass(K_, 0.0);
    double s_check = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
      mass[k] += alpha_ * beta_ / (beta_v_ + nk_[k]);
      s_check += mass[k];
    }
    for (std::uint32_t k : doc_nz_) mass[k] += beta_ * doc_count_[k] / (beta_v_ + nk_[k]);
    for (std::uint32_t k : word_nz_[w]) mass[k] += coef_[k] * nwk_[w * K_ + k];
    if (std::abs(s_check - s_sum_) > 1e-9 * s_check) throw Error("smoothing bucket out of sync");
    add(w, old);
    leave_doc();
    return mass;
  }

  std::vector<double> dense_masses(std::size_t d, std::size_t i) const {
    const std::uint32_t w = docs_[d][i];
    std::vector<double> ndk(K_, 0.0);
    for (std::size_t j = 0; j < docs_[d].size(); ++j)
      if (j != i) ndk[z_[d][j]] += 1.0;
    std::vector<double> mass(K_);
    for (std::size_t k = 0; k < K_; ++k) {
      const bool own = z_[d][i] == k;
      const double nw = nwk_[w * K_ + k] - (own ? 1.0 : 0.0);
      const double n = nk_[k] - (own ? 1.0 : 0.0);
      mass[k] = (alpha_ + ndk[k]) * (beta_ + nw) / (beta_v_ + n);
    }
    return mass;
  }

  std::vector<std::uint32_t> counts_topic_major() const {
    std::vector<std::uint32_t> out(K_ * V_);
    for (std::size_t w = 0; w < V_; ++w)
      for (std::size_t k = 0; k < K_; ++k) out[k * V_ + w] = nwk_[w * K_ + k];
    return out;
  }
  const std::vector<std::uint64_t>& topic_totals() const { return nk_; }
  EncodedDocs take_assignments() { return std::move(z_); }

 private:
  void inc_word(std::uint32_t w, std::uint32_t k) {
    if (nwk_[w * K_ + k]++ == 0) {
      word_pos_[w * K_ + k] = static_cast<std::uint32_t>(word_nz_[w].size());
      word_nz_[w].push_back(k);
    }
  }

  void dec_word(std::uint32_t w, std::uint32_t k) {
    if (--nwk_[w * K_ + k] == 0) {
      auto& nz = word_nz_[w];
      const std::uint32_t pos = word_pos_[w * K_ + k];
      const std::uint32_t last = nz.back();
      nz[pos] = last;
      word_pos_[w * K_ + last] = pos;
      nz.pop_back();
    }
  }

  double denom(std::uint32_t k) const { return beta_v_ + static_cast<double>(nk_[k]); }

  void reset_smoothing() {
    s_sum_ = 0.0;
    for (std::uint32_t k = 0; k < K_; ++k) {
      s_sum_ += alpha_ * beta_ / denom(k);
      coef_[k] = alpha_ / denom(k);
    }
  }

  void enter_doc(std::size_t d) {
    for (std::uint32_t k : z_[d]) {
      if (doc_count_[k]++ == 0) {
        doc_pos_[k] = static_cast<std::uint32_t>(doc_nz_.size());
        doc_nz_.push_back(k);
      }
    }
    r_sum_ = 0.0;
    for (std::uint32_t k : doc_nz_) {
      r_sum_ += beta_ * doc_count_[k] / denom(k);
      coef_[k] = (alpha_ + doc_count_[k]) / denom(k);
    }
  }

  void leave_doc() {
    for (std::uint32_t k : doc_nz_) {
      doc_count_[k] = 0;
      coef_[k] = alpha_ / denom(k);
    }
    doc_nz_.clear();
  }

  void retire(std::uint32_t k) {
    s_sum_ -= alpha_ * beta_ / denom(k);
    r_sum_ -= beta_ * doc_count_[k] / denom(k);
  }

  void restore(std::uint32_t k) {
    s_sum_ += alpha_ * beta_ / denom(k);
    r_sum_ += beta_ * doc_count_[k] / denom(k);
    coef_[k] = (alpha_ + doc_count_[k]) / denom(k);
  }

  void remove(std::uint32_t w, std::uint32_t k) {
    retire(k);
    --nk_[k];
    dec_word(w, k);
    if (--doc_count_[k] == 0) {
      const std::uint32_t pos = doc_pos_[k];
      const std::uint32_t last = doc_nz_.back();
      doc_nz_[pos] = last;
      doc_pos_[last] = pos;
      doc_nz_.pop_back();
    }
    restore(k);
  }

  void add(std::uint32_t w, std::uint32_t k) {
    retire(k);
    ++nk_[k];
    inc_word(w, k);
    if (doc_count_[k]++ == 0) {
      doc_pos_[k] = static_cast<std::uint32_t>(doc_nz_.size());
      doc_nz_.push_back(k);
    }
    restore(k);
  }

  std::uint32_t draw(std::uint32_t w, Rng& rng) {
    const auto& wnz = word_nz_[w];
    double q_sum = 0.0;
    for (std::size_t j = 0; j < wnz.size(); ++j) {
      q_buf_[j] = coef_[wnz[j]] * nwk_[w * K_ + wnz[j]];
      q_sum += q_buf_[j];
    }
    const double s = std::max(s_sum_, 0.0);
    const double r = std::max(r_sum_, 0.0);
    double u = rng.uniform() * (s + r + q_sum);
    if (u < q_sum && !wnz.empty()) {
      for (std::size_t j = 0; j < wnz.size(); ++j) {
        u -= q_buf_[j];
        if (u <= 0.0) return wnz[j];
      }
      return wnz.back();
    }
    u -= q_sum;
    if (u < r && !doc_nz_.empty()) {
      for (std::uint32_t k : doc_nz_) {
        u -= beta_ * doc_count_[k] / denom(k);
        if (u <= 0.0) return k;
      }
      return doc_nz_.back();
    }
    u -= r;
    for (std::uint32_t k = 0; k < K_; ++k) {
      u -= alpha_ * beta_ / denom(k);
      if (u <= 0.0) return k;
    }
    return static_cast<std::uint32_t>(K_ - 1);
  }

  const EncodedDocs& docs_;
  std::size_t K_;
  std::size_t V_;
  double alpha_;
  double beta_;
  double beta_v_;
  std::vector<std::uint32_t> nwk_;       // word-major V x K
  std::vector<std::uint32_t> word_pos_;  // position of k in word_nz_[w]
  std::vector<std::vector<std::uint32_t>> word_nz_;
  std::vector<std::uint64_t> nk_;
  std::vector<std::uint32_t> doc_count_;
  std::vector<std::uint32_t> doc_pos_;
  std::vector<std::uint32_t> doc_nz_;
  std::vector<double> coef_;
  std::vector<double> q_buf_;
  double s_sum_ = 0.0;
  double r_sum_ = 0.0;
  EncodedDocs z_;
};

void check_inputs(const EncodedDocs& docs, std::size_t V, const LdaConfig& config) {
  config.validate();
  if (V == 0) throw InvalidInput("LDA vocabulary is empty");
  std::size_t tokens = 0;
  for (const auto& d : docs) {
    for (std::uint32_t w : d)
      if (w >= V) throw InvalidInput("token id " + std::to_string(w) + " outside vocabulary");
    tokens += d.size();
  }
  if (tokens == 0) throw InvalidInput("LDA training documents contain no in-vocabulary tokens");
  if (config.n_topics > tokens)
    throw InvalidInput("LDA n_topics (" + std::to_string(config.n_topics) +
                       ") exceeds the number of tokens (" + std::to_string(tokens) + ")");
}

}  // namespace

LdaModel LdaModel::fit(const EncodedDocs& docs, std::size_t vocab_size, const LdaConfig& config) {
  check_inputs(docs, vocab_size, config);
  Rng rng(mix_seed(config.seed, 0x4c4441));
  SparseSampler sampler(docs, vocab_size, config, rng);
  for (std::size_t it = 0; it < config.iterations; ++it) sampler.sweep(rng);

  LdaModel m;
  m.config_ = config;
  m.vocab_size_ = vocab_size;
  m.counts_ = sampler.counts_topic_major();
  m.phi_ = Matrix(config.n_topics, vocab_size);
  const auto& nk = sampler.topic_totals();
  const double bv = config.beta * static_cast<double>(vocab_size);
  for (std::size_t k = 0; k < config.n_topics; ++k) {
    const double denom = static_cast<double>(nk[k]) + bv;
    for (std::size_t w = 0; w < vocab_size; ++w)
      m.phi_(k, w) = (m.counts_[k * vocab_size + w] + config.beta) / denom;
  }
  m.assignments_ = sampler.take_assignments();
  m.build_inference_tables();
  return m;
}

void LdaModel::build_inference_tables() {
  const std::size_t K = n_topics();
  word_cdf_ = Matrix(vocab_size_, K);
  word_mass_.assign(vocab_size_, 0.0);
  for (std::size_t w = 0; w < vocab_size_; ++w) {
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      acc += phi_(k, w);
      word_cdf_(w, k) = acc;
    }
    word_mass_[w] = acc;
  }
}

TopicInference LdaModel::infer(const std::vector<std::uint32_t>& doc) const {
  const std::size_t K = n_topics();
  TopicInference out;
  if (doc.empty()) {
    out.proportions.assign(K, 1.0 / static_cast<double>(K));
    out.degenerate = true;
    return out;
  }
  std::vector<std::string> key;
  key.reserve(doc.size());
  for (std::uint32_t w : doc) key.push_back(std::to_string(w));
  Rng rng(mix_seed(config_.seed, hash_tokens(key)));

  const double alpha = config_.alpha;
  std::vector<std::uint32_t> z(doc.size());
  std::vector<std::uint32_t> count(K, 0), pos(K, 0);
  std::vector<std::uint32_t> nz;
  auto add = [&](std::uint32_t k) {
    if (count[k]++ == 0) {
      pos[k] = static_cast<std::uint32_t>(nz.size());
      nz.push_back(k);
    }
  };
  auto remove = [&](std::uint32_t k) {
    if (--count[k] == 0) {
      const std::uint32_t p = pos[k], last = nz.back();
      nz[p] = last;
      pos[last] = p;
      nz.pop_back();
    }
  };
  // Draw from alpha * phi[.][w]: binary search in the word's topic CDF.
  auto prior_draw = [&](std::uint32_t w, double u) {
    const auto row = word_cdf_.row(w);
    auto it = std::upper_bound(row.begin(), row.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - row.begin(), K - 1));
  };
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc[i] >= vocab_size_) throw InvalidInput("token id outside vocabulary");
    z[i] = prior_draw(doc[i], rng.uniform() * word_mass_[doc[i]]);
    add(z[i]);
  }

  std::vector<double> accum(K, 0.0);
  std::size_t samples = 0;
  for (std::size_t it = 0; it < config_.infer_iterations; ++it) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::uint32_t w = doc[i];
      remove(z[i]);
      double doc_mass = 0.0;
      for (std::uint32_t k : nz) doc_mass += count[k] * phi_(k, w);
      const double prior_mass = alpha * word_mass_[w];
      double u = rng.uniform() * (doc_mass + prior_mass);
      std::uint32_t chosen = 0;
      if (u < doc_mass && !nz.empty()) {
        chosen = nz.back();
        for (std::uint32_t k : nz) {
          u -= count[k] * phi_(k, w);
          if (u <= 0.0) {
            chosen = k;
            break;
          }
        }
      } else {
        chosen = prior_draw(w, std::max(0.0, (u - doc_mass) / alpha));
      }
      z[i] = chosen;
      add(chosen);
    }
    if (it >= config_.infer_burn_in) {
      for (std::size_t k = 0; k < K; ++k) accum[k] += count[k];
      ++samples;
    }
  }
  const double n = static_cast<double>(doc.size());
  const double denom = n + static_cast<double>(K) * alpha;
  out.proportions.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    out.proportions[k] = (accum[k] / static_cast<double>(samples) + alpha) / denom;
  // Remove rounding drift so the vector sums to one.
  const double total = std::accumulate(out.proportions.begin(), out.proportions.end(), 0.0);
  for (double& p : out.proportions) p /= total;
  return out;
}

void LdaModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "lda.json", {{"config", config_.to_json()}, {"vocab_size", vocab_size_}});
  write_matrix_blob(dir / "phi.bin", phi_);
  write_u32_blob(dir / "topic_word_counts.bin", {n_topics(), vocab_size_, counts_});
}

LdaModel LdaModel::load(const std::filesystem::path& dir) {
  LdaModel m;
  const auto j = read_json_file(dir / "lda.json");
  m.config_ = LdaConfig::from_json(j.at("config"));
  m.vocab_size_ = j.at("vocab_size").get<std::size_t>();
  m.phi_ = read_matrix_blob(dir / "phi.bin");
  m.counts_ = read_u32_blob(dir / "topic_word_counts.bin").data;
  if (m.phi_.rows != m.config_.n_topics || m.phi_.cols != m.vocab_size_ ||
      m.counts_.size() != m.phi_.data.size())
    throw Error("LDA model files in " + dir.string() + " have inconsistent shapes");
  m.build_inference_tables();
  return m;
}

namespace lda_detail {

ConditionalPair conditional_for_token(const EncodedDocs& docs, std::size_t vocab_size,
                                      const LdaConfig& config, std::size_t sweeps,
                                      std::size_t doc, std::size_t position) {
  check_inputs(docs, vocab_size, config);
  if (doc >= docs.size() || position >= docs[doc].size())
    throw InvalidInput("token position out of range");
  Rng rng(mix_seed(config.seed, 0x4c4441));
  SparseSampler sampler(docs, vocab_size, config, rng);
  for (std::size_t it = 0; it < sweeps; ++it) sampler.sweep(rng);
  auto normalize = [](std::vector<double> v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= total;
    return v;
  };
  return {normalize(sampler.dense_masses(doc, position)),
          normalize(sampler.bucket_masses(doc, position))};
}

}  // namespace lda_detail

}  // namespace ticketscope
