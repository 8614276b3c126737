#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ticketscope/corpus.h"

namespace ticketscope::textprep {

enum class TokenPattern {
  AlphaOnly,           // [a-z]{2,}
  AlnumLeadingLetter,  // [a-z]\w+
  AlnumWithPaths,      // [a-zA-Z/][\w/?.=]+
};

std::string_view to_string(TokenPattern p);
TokenPattern token_pattern_from_string(std::string_view s);

struct CleanConfig {
  std::set<std::string> domain_stopwords{"tickets", "ticketing", "mailto", "wrote", "re", "fwd"};
  // Word sequences joined with "_" after stemming. Matching is done on the
  // stemmed components; the emitted token is the unstemmed words joined.
  std::vector<std::vector<std::string>> bigrams{{"high", "performance", "computing"},
                                                {"los", "alamos"}};
  // Automated reply footer: a line starting "-- " through the end of the text.
  std::string footer_pattern = R"((?:^|\n)-- [\s\S]*\z)";
  bool remove_english_stopwords = false;
  TokenPattern token_pattern = TokenPattern::AlnumWithPaths;

  static CleanConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Runs the eleven cleaning steps in order and returns the cleaned text.
std::string clean(std::string_view text, const CleanConfig& config = {});

// Individual cleaning steps, exposed for testing. Each returns a new string.
namespace steps {
std::string strip_non_ascii(std::string_view s);                               // 1
std::string replace_footer(std::string_view s, const std::string& pattern);    // 2
std::string lowercase(std::string_view s);                                     // 3
std::string remove_domain_stopwords(std::string_view s, const std::set<std::string>& words);  // 4
std::string replace_phone_numbers(std::string_view s);                         // 5
std::string preserve_addresses(std::string_view s);                            // 6
std::string remove_symbols(std::string_view s);                                // 7
std::string replace_hex(std::string_view s);                                   // 8
std::string stem_words(std::string_view s);                                    // 9
std::string join_bigrams(std::string_view s,
                         const std::vector<std::vector<std::string>>& bigrams);  // 10
std::string collapse_whitespace(std::string_view s);                           // 11
}  // namespace steps

std::vector<std::string> tokenize(std::string_view clean_text, TokenPattern pattern);
bool matches_pattern(std::string_view token, TokenPattern pattern);

// The vendored 179-word English list.
const std::vector<std::string>& english_stopwords();
// The list plus the stemmed form of every entry; cleaned text is stemmed, so
// filtering must see "veri" as well as "very".
const std::set<std::string>& english_stopwords_stemmed();

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const std::set<std::string>& stopwords);

// How a document becomes a token list for a particular feature model.
struct DocPrep {
  TokenPattern pattern = TokenPattern::AlnumWithPaths;
  bool remove_stopwords = true;

  std::vector<std::string> tokens(std::string_view raw_text, const CleanConfig& config) const;
  // Same as tokens() for text that already went through clean().
  std::vector<std::string> tokens_from_clean(std::string_view clean_text,
                                             const CleanConfig& config) const;
  nlohmann::json to_json() const;
  static DocPrep from_json(const nlohmann::json& j);
};

struct TokenDoc {
  std::string ticket_id;
  ContentScope scope = ContentScope::CreateOnly;
  std::vector<std::string> tokens;
};

}  // namespace ticketscope::textprep
