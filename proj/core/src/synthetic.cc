#include "ticketscope/synthetic.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "ticketscope/error.h"
#include "ticketscope/stemmer.h"
#include "ticketscope/textprep.h"

namespace ticketscope {

namespace {

constexpr std::string_view kConsonants = "bcdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
const std::vector<std::string> kMachines{"grizzly", "snow", "badger", "trinity", "wolf"};

// Planted synonym groups: (surface word A, surface word B, left anchor, right anchor).
struct SynonymPlant {
  const char* a;
  const char* b;
};
constexpr SynonymPlant kPlants[] = {{"machine", "computer"}, {"permission", "policy"}};

bool usable_word(const std::string& w, const std::set<std::string>& taken) {
  if (taken.contains(w)) return false;
  if (porter2_stem(w) != w) return false;
  const auto& stop = textprep::english_stopwords_stemmed();
  if (stop.contains(w)) return false;
  static const std::set<std::string> reserved{"tickets", "ticketing", "mailto", "wrote", "re",
                                              "fwd",     "footer",    "high",   "los",   "machin",
                                              "comput",  "permiss",   "polici", "phone", "number"};
  return !reserved.contains(w);
}

std::vector<std::string> make_vocabulary(std::size_t n, Rng& rng) {
  std::vector<std::string> words;
  std::set<std::string> taken;
  while (words.size() < n) {
    std::string w;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kConsonants[rng.below(kConsonants.size())];
      w += kVowels[rng.below(kVowels.size())];
      if (rng.uniform() < 0.35) w += kConsonants[rng.below(kConsonants.size())];
    }
    if (!usable_word(w, taken)) continue;
    taken.insert(w);
    words.push_back(std::move(w));
  }
  return words;
}

struct Distribution {
  std::vector<std::string> words;
  std::vector<double> weights;  // normalized

  const std::string& draw(Rng& rng) const { return words[rng.discrete(weights)]; }
};

Distribution zipf_block(std::vector<std::string> words) {
  Distribution d;
  double total = 0.0;
  for (std::size_t r = 0; r < words.size(); ++r) {
    const double w = 1.0 / std::pow(static_cast<double>(r + 1), 0.8);
    d.weights.push_back(w);
    total += w;
  }
  for (double& w : d.weights) w /= total;
  d.words = std::move(words);
  return d;
}

class TextSampler {
 public:
  TextSampler(const std::vector<Distribution>& topics, const Distribution& background,
              double sharpness)
      : topics_(topics), background_(background), sharpness_(sharpness) {}

  std::vector<std::string> words(std::size_t topic, std::size_t n, Rng& rng) const {
    std::vector<std::string> out;
    out.reserve(n + 3);
    while (out.size() < n) {
      if (topic < kPlantCount && rng.uniform() < 0.04) {
        // Synonyms appear between fixed anchors so they share exact contexts.
        const auto& plant = kPlants[topic];
        const auto& t = topics_[topic];
        out.push_back(t.words[1]);
        out.push_back(rng.uniform() < 0.5 ? plant.a : plant.b);
        out.push_back(t.words[2]);
        continue;
      }
      if (rng.uniform() < sharpness_)
        out.push_back(topics_[topic].draw(rng));
      else
        out.push_back(background_.draw(rng));
    }
    return out;
  }

  static std::string sentence_text(const std::vector<std::string>& words, Rng& rng) {
    std::string out;
    std::size_t since_period = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::string w = words[i];
      if (since_period == 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(w[0]));
      if (i) out += ' ';
      out += w;
      ++since_period;
      if (since_period >= 6 && rng.uniform() < 0.25) {
        out += rng.uniform() < 0.85 ? "." : "?";
        since_period = 0;
      } else if (rng.uniform() < 0.05) {
        out += ',';
      }
    }
    out += '.';
    return out;
  }

  static constexpr std::size_t kPlantCount = std::size(kPlants);

 private:
  const std::vector<Distribution>& topics_;
  const Distribution& background_;
  double sharpness_;
};

std::string id_for(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%05zu", i + 1);
  return buf;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i + 1);
  return buf;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_categories < 2) throw InvalidInput("synthetic corpus needs at least 2 categories");
  if (spec.vocab_size < 50) throw InvalidInput("synthetic corpus needs vocab_size >= 50");
  if (spec.n_tickets < spec.n_categories * 10)
    throw InvalidInput("n_tickets must be at least 10 x n_categories (" +
                       std::to_string(spec.n_categories * 10) + ")");
  if (spec.topic_sharpness < 0.0 || spec.topic_sharpness > 1.0)
    throw InvalidInput("topic_sharpness must lie in [0, 1]");
  if (spec.n_requestors < 1 || spec.n_consultants < 1)
    throw InvalidInput("requestor and consultant pools must be non-empty");

  Rng rng(spec.seed);
  const std::vector<std::string> vocab = make_vocabulary(spec.vocab_size, rng);

  // Vocabulary split: one background block plus one block per topic.
  const std::size_t blocks = spec.n_categories + 1;
  const std::size_t per_block = vocab.size() / blocks;
  if (per_block < 3) throw InvalidInput("vocab_size too small for the number of categories");
  std::vector<Distribution> topics;
  for (std::size_t t = 0; t < spec.n_categories; ++t) {
    const auto first = vocab.begin() + static_cast<std::ptrdiff_t>((t + 1) * per_block);
    const auto last = t + 1 == spec.n_categories ? vocab.end()
                                                 : first + static_cast<std::ptrdiff_t>(per_block);
    topics.push_back(zipf_block({first, last}));
  }
  const Distribution background =
      zipf_block({vocab.begin(), vocab.begin() + static_cast<std::ptrdiff_t>(per_block)});
  const TextSampler sampler(topics, background, spec.topic_sharpness);

  std::vector<std::string> categories;
  for (std::size_t c = 0; c < spec.n_categories; ++c) categories.push_back(numbered("Category-", c));
  std::vector<std::string> requestors, consultants;
  for (std::size_t i = 0; i < spec.n_requestors; ++i) requestors.push_back(numbered("u", i));
  for (std::size_t i = 0; i < spec.n_consultants; ++i) consultants.push_back(numbered("c", i));

  // Requestors follow a Zipf-like activity profile.
  std::vector<double> requestor_weights;
  for (std::size_t i = 0; i < requestors.size(); ++i)
    requestor_weights.push_back(1.0 / static_cast<double>(i + 1));

  using namespace std::chrono;
  const Timestamp start = sys_days{year{2017} / January / 1};
  const auto span_seconds = duration_cast<seconds>(sys_days{year{2019} / July / 31} - sys_days{year{2017} / January / 1}).count();

  SyntheticCorpus out;
  const std::size_t guaranteed = spec.n_categories * 10;
  for (std::size_t i = 0; i < spec.n_tickets; ++i) {
    Ticket t;
    t.id = id_for(i);
    const bool forced = i < guaranteed;
    const std::size_t topic = forced && spec.label_mode == LabelMode::TopicAligned
                                  ? i % spec.n_categories
                                  : rng.below(spec.n_categories);
    std::size_t category = topic;
    if (spec.label_mode == LabelMode::Random) category = forced ? i % spec.n_categories : rng.below(spec.n_categories);
    t.categories.push_back(categories[category]);
    if (!forced && rng.uniform() < spec.multi_category_fraction) {
      const std::size_t extra = (category + 1 + rng.below(spec.n_categories - 1)) % spec.n_categories;
      t.categories.push_back(categories[extra]);
    }

    t.created = start + seconds{static_cast<long long>(rng.below(static_cast<std::size_t>(span_seconds)))};
    t.requestor = requestors[rng.discrete(requestor_weights)];
    // Consultants specialise: topic t is preferentially handled by consultant t mod n.
    if (!forced && rng.uniform() < 0.05) {
      t.owner.clear();
    } else if (rng.uniform() < 0.6) {
      t.owner = consultants[topic % consultants.size()];
    } else {
      t.owner = consultants[rng.below(consultants.size())];
    }

    const double status_draw = rng.uniform();
    if (forced) {
      t.status = Status::Resolved;
    } else if (status_draw < spec.inactive_fraction) {
      t.status = Status::Rejected;
    } else if (status_draw < 0.9) {
      t.status = Status::Resolved;
    } else {
      constexpr Status kOthers[] = {Status::Open, Status::Stalled, Status::Waiting, Status::New};
      t.status = kOthers[rng.below(4)];
    }
    const double contact_draw = rng.uniform();
    t.contact = forced || contact_draw >= spec.phone_fraction + 0.03
                    ? Contact::Email
                    : (contact_draw < spec.phone_fraction ? Contact::Phone : Contact::Other);

    t.subject = TextSampler::sentence_text(sampler.words(topic, 4 + rng.below(4), rng), rng);
    t.subject.pop_back();  // subjects carry no trailing period
    std::string body = TextSampler::sentence_text(sampler.words(topic, 25 + rng.below(20), rng), rng);
    if (rng.uniform() < 0.15) {
      body += " Files are in /usr/projects/" + topics[topic].words[0] + "/run" +
              std::to_string(rng.below(100)) + " now.";
    }
    if (rng.uniform() < 0.1) body += " Call me at 505-" + std::to_string(600 + rng.below(100)) + "-1234.";
    if (t.contact != Contact::Phone) t.create_message = body;

    const std::string reply =
        TextSampler::sentence_text(sampler.words(topic, 30 + rng.below(30), rng), rng);
    std::string quoted;
    for (const auto& line : {body}) quoted += "> " + line + "\n";
    t.content = reply + "\nOn " + format_utc_timestamp(t.created) + " " + t.requestor +
                " wrote:\n" + quoted + "-- \nHPC Consult Team\nhttps://hpc.example.gov/consult\n";
    t.comments = TextSampler::sentence_text(sampler.words(topic, 5 + rng.below(10), rng), rng);
    if (rng.uniform() < 0.5) t.machine = kMachines[rng.below(kMachines.size())];

    out.topic_of.emplace(t.id, topic);
    out.tickets.push_back(std::move(t));
  }

  for (const auto& d : topics) {
    std::vector<std::pair<std::string, double>> dist;
    for (std::size_t i = 0; i < d.words.size(); ++i) dist.emplace_back(d.words[i], d.weights[i]);
    out.topic_words.push_back(std::move(dist));
  }
  for (std::size_t i = 0; i < background.words.size(); ++i)
    out.background_words.emplace_back(background.words[i], background.weights[i]);
  for (std::size_t p = 0; p < std::min(TextSampler::kPlantCount, spec.n_categories); ++p)
    out.synonym_pairs.emplace_back(porter2_stem(kPlants[p].a), porter2_stem(kPlants[p].b));
  return out;
}

}  // namespace ticketscope
