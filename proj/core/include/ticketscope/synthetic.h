#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ticketscope/corpus.h"

namespace ticketscope {

enum class LabelMode {
  TopicAligned,  // category i owns topic i
  Random,        // categories drawn independently of the text
};

struct SyntheticSpec {
  std::size_t n_tickets = 2000;
  std::size_t n_categories = 8;
  std::size_t vocab_size = 500;
  // Probability that a content word comes from the ticket's topic rather than
  // the shared background distribution.
  double topic_sharpness = 0.9;
  std::uint64_t seed = 7;
  LabelMode label_mode = LabelMode::TopicAligned;
  std::size_t n_requestors = 60;
  std::size_t n_consultants = 8;
  double multi_category_fraction = 0.02;
  double phone_fraction = 0.08;
  double inactive_fraction = 0.02;
};

struct SyntheticCorpus {
  std::vector<Ticket> tickets;
  std::map<std::string, std::size_t> topic_of;  // ticket id -> generating topic
  // One distribution per topic; words are already stable under cleaning.
  std::vector<std::vector<std::pair<std::string, double>>> topic_words;
  std::vector<std::pair<std::string, double>> background_words;
  // Planted pairs used interchangeably in identical contexts, as cleaned stems.
  std::vector<std::pair<std::string, std::string>> synonym_pairs;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace ticketscope
