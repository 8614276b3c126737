#include "ticketscope/embedding.h"

#include <algorithm>
#include <cmath>

#include "ticketscope/blob.h"
#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

nlohmann::json EmbeddingConfig::to_json() const {
  return {{"dim", dim},
          {"window", window},
          {"min_count", min_count},
          {"negative", negative},
          {"epochs", epochs},
          {"learning_rate", learning_rate},
          {"min_learning_rate", min_learning_rate},
          {"normalize", normalize},
          {"infer_epochs", infer_epochs},
          {"seed", seed}};
}

EmbeddingConfig EmbeddingConfig::from_json(const nlohmann::json& j) {
  EmbeddingConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "dim") c.dim = value.get<std::size_t>();
    else if (key == "window") c.window = value.get<std::size_t>();
    else if (key == "min_count") c.min_count = value.get<std::size_t>();
    else if (key == "negative") c.negative = value.get<std::size_t>();
    else if (key == "epochs") c.epochs = value.get<std::size_t>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "min_learning_rate") c.min_learning_rate = value.get<double>();
    else if (key == "normalize") c.normalize = value.get<bool>();
    else if (key == "infer_epochs") c.infer_epochs = value.get<std::size_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else throw InvalidInput("unknown embedding option '" + key + "'");
  }
  return c;
}

void EmbeddingConfig::validate() const {
  if (dim == 0) throw InvalidInput("embedding dim must be positive");
  if (window == 0) throw InvalidInput("embedding window must be positive");
  if (negative == 0) throw InvalidInput("embedding needs at least one negative sample");
  if (epochs == 0) throw InvalidInput("embedding epochs must be positive");
  if (!(learning_rate > 0.0) || min_learning_rate < 0.0 || min_learning_rate > learning_rate)
    throw InvalidInput("embedding learning rates must satisfy 0 <= min <= initial, initial > 0");
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

std::uint32_t draw_noise(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

// One negative-sampling step: `input` predicts `target` against `negative`
// noise words. The input update is accumulated in `grad`; output vectors are
// updated in place when `trainable` is given. Returns the pair's loss.
double sgns_step(std::span<const double> input, std::uint32_t target, double lr,
                 std::size_t negative, const std::vector<double>& noise_cdf,
                 const Matrix& outputs, Matrix* trainable, std::vector<double>& grad, Rng& rng) {
  double loss = 0.0;
  const std::size_t dim = input.size();
  for (std::size_t s = 0; s <= negative; ++s) {
    std::uint32_t word = target;
    double label = 1.0;
    if (s > 0) {
      word = draw_noise(noise_cdf, rng);
      if (word == target) continue;
      label = 0.0;
    }
    const auto out = outputs.row(word);
    double f = 0.0;
    for (std::size_t i = 0; i < dim; ++i) f += input[i] * out[i];
    loss -= label > 0 ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = (label - sigmoid(f)) * lr;
    for (std::size_t i = 0; i < dim; ++i) grad[i] += g * out[i];
    if (trainable) {
      auto w = trainable->row(word);
      for (std::size_t i = 0; i < dim; ++i) w[i] += g * input[i];
    }
  }
  return loss;
}

void random_init(std::span<double> v, Rng& rng) {
  const double scale = 1.0 / static_cast<double>(v.size());
  for (double& x : v) x = (rng.uniform() - 0.5) * scale;
}

}  // namespace

void EmbeddingModel::build_noise_table() {
  noise_cdf_.resize(vocab_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    acc += std::pow(static_cast<double>(vocab_.count(i)), 0.75);
    noise_cdf_[i] = acc;
  }
}

EmbeddingModel EmbeddingModel::fit(const Docs& docs, const EmbeddingConfig& config) {
  config.validate();
  EmbeddingModel m;
  m.config_ = config;
  m.vocab_ = Vocabulary::build(docs, config.min_count);
  if (m.vocab_.empty())
    throw InvalidInput("no word occurs at least min_count=" + std::to_string(config.min_count) +
                       " times; embedding vocabulary is empty");
  m.build_noise_table();

  const std::size_t V = m.vocab_.size();
  const std::size_t dim = config.dim;
  Rng rng(mix_seed(config.seed, 0x57325));
  m.words_ = Matrix(V, dim);
  for (std::size_t w = 0; w < V; ++w) random_init(m.words_.row(w), rng);
  m.outputs_ = Matrix(V, dim, 0.0);
  m.docs_ = Matrix(docs.size(), dim);
  for (std::size_t d = 0; d < docs.size(); ++d) random_init(m.docs_.row(d), rng);

  std::vector<std::vector<std::uint32_t>> encoded;
  std::size_t total_tokens = 0;
  for (const auto& doc : docs) {
    encoded.push_back(m.vocab_.encode(doc));
    total_tokens += encoded.back().size();
  }
  const double total = static_cast<double>(total_tokens * config.epochs);
  double processed = 0.0;
  std::vector<double> grad(dim);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t pairs = 0;
    for (std::size_t d = 0; d < encoded.size(); ++d) {
      const auto& ids = encoded[d];
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const double lr = std::max(config.min_learning_rate,
                                   config.learning_rate * (1.0 - processed / total));
        processed += 1.0;
        const std::uint32_t target = ids[i];

        auto dv = m.docs_.row(d);
        std::fill(grad.begin(), grad.end(), 0.0);
        loss += sgns_step(dv, target, lr, config.negative, m.noise_cdf_, m.outputs_, &m.outputs_, grad, rng);
        for (std::size_t j = 0; j < dim; ++j) dv[j] += grad[j];
        ++pairs;

        // Skip-gram over a randomly shrunk window, as in word2vec.
        const std::size_t reduce = rng.below(config.window);
        const std::size_t span = config.window - reduce;
        const std::size_t lo = i >= span ? i - span : 0;
        const std::size_t hi = std::min(ids.size() - 1, i + span);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == i) continue;
          auto wv = m.words_.row(ids[c]);
          std::fill(grad.begin(), grad.end(), 0.0);
          loss += sgns_step(wv, target, lr, config.negative, m.noise_cdf_, m.outputs_, &m.outputs_, grad, rng);
          for (std::size_t j = 0; j < dim; ++j) wv[j] += grad[j];
          ++pairs;
        }
      }
    }
    m.losses_.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
  }
  return m;
}

DocVector EmbeddingModel::infer(const std::vector<std::string>& tokens) const {
  DocVector out;
  const auto ids = vocab_.encode(tokens);
  if (ids.empty()) {
    out.values.assign(config_.dim, 0.0);
    out.degenerate = true;
    return out;
  }
  std::vector<std::string> key;
  for (std::uint32_t w : ids) key.push_back(vocab_.term(w));
  Rng rng(mix_seed(config_.seed, hash_tokens(key)));
  out.values.resize(config_.dim);
  random_init(out.values, rng);

  const std::size_t epochs = config_.infer_epochs ? config_.infer_epochs : config_.epochs;
  const double total = static_cast<double>(epochs * ids.size());
  double processed = 0.0;
  std::vector<double> grad(config_.dim);
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::uint32_t w : ids) {
      const double lr = std::max(config_.min_learning_rate,
                                 config_.learning_rate * (1.0 - processed / total));
      processed += 1.0;
      std::fill(grad.begin(), grad.end(), 0.0);
      sgns_step(out.values, w, lr, config_.negative, noise_cdf_, outputs_, nullptr, grad, rng);
      for (std::size_t j = 0; j < grad.size(); ++j) out.values[j] += grad[j];
    }
  }
  if (config_.normalize) normalize_l2(out.values);
  return out;
}

std::vector<double> EmbeddingModel::word_vector(const std::string& word) const {
  const auto idx = vocab_.index(word);
  if (!idx) throw NotFound("word '" + word + "' is not in the embedding vocabulary");
  const auto row = words_.row(*idx);
  std::vector<double> v(row.begin(), row.end());
  normalize_l2(v);
  return v;
}

std::vector<std::pair<std::string, double>> EmbeddingModel::similar_words(const std::string& word,
                                                                          std::size_t k) const {
  const auto idx = vocab_.index(word);
  if (!idx) {
    std::vector<std::pair<std::size_t, std::string>> near;
    for (const auto& t : vocab_.terms()) near.emplace_back(edit_distance(word, t), t);
    const std::size_t n = std::min<std::size_t>(3, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(n), near.end());
    std::string msg = "word '" + word + "' is not in the embedding vocabulary";
    if (n) {
      msg += "; closest: ";
      for (std::size_t i = 0; i < n; ++i) msg += (i ? ", " : "") + near[i].second;
    }
    throw NotFound(msg);
  }
  const auto q = words_.row(*idx);
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    if (w == *idx) continue;
    scored.emplace_back(vocab_.term(w), cosine(q, words_.row(w)));
  }
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  scored.resize(n);
  return scored;
}

void EmbeddingModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "embedding.json",
                  {{"config", config_.to_json()}, {"epoch_losses", losses_}});
  write_json_file(dir / "vocab.json", vocab_.to_json());
  write_matrix_blob(dir / "word_vectors.bin", words_);
  write_matrix_blob(dir / "output_vectors.bin", outputs_);
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& dir) {
  EmbeddingModel m;
  const auto j = read_json_file(dir / "embedding.json");
  m.config_ = EmbeddingConfig::from_json(j.at("config"));
  m.losses_ = j.at("epoch_losses").get<std::vector<double>>();
  m.vocab_ = Vocabulary::from_json(read_json_file(dir / "vocab.json"));
  m.words_ = read_matrix_blob(dir / "word_vectors.bin");
  m.outputs_ = read_matrix_blob(dir / "output_vectors.bin");
  if (m.words_.rows != m.vocab_.size() || m.outputs_.rows != m.vocab_.size() ||
      m.words_.cols != m.config_.dim || m.outputs_.cols != m.config_.dim)
    throw Error("embedding model files in " + dir.string() + " have inconsistent shapes");
  m.build_noise_table();
  return m;
}

}  // namespace ticketscope
