#include "ticketscope/textprep.h"

#include <boost/regex.hpp>

#include <algorithm>

#include "ticketscope/error.h"
#include "ticketscope/stemmer.h"
#include "ticketscope/util.h"

namespace ticketscope::textprep {

namespace {

constexpr auto kPythonLike = boost::regex::perl | boost::regex::no_mod_m;

const boost::regex& phone_regex() {
  static const boost::regex re(R"((\d{3}-\d{3}-\d{4})|\d{3} \d{3}-\d{4})", kPythonLike);
  return re;
}

const boost::regex& hex_regex() {
  static const boost::regex re(R"(0x[0-9a-f]+|[0-9a-f]{16})", kPythonLike);
  return re;
}

// The euro sign is kept verbatim even though step 1 has already removed every
// non-ASCII byte by the time this runs.
const boost::regex& symbol_regex() {
  static const boost::regex re(
      "[!#<>:\\[\\]\\{\\}\xE2\x82\xAC,\\\"\\(\\)\\*;]+|[\\.\\?]\\s|:[-_~=\\.]{2,}", kPythonLike);
  return re;
}

const boost::regex& url_scheme_regex() {
  static const boost::regex re(R"(http(s)?://)", kPythonLike);
  return re;
}

bool is_py_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!is_word_char(c)) out += '\\';
    out += c;
  }
  return out;
}

std::vector<std::string> split_py_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_py_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_py_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

bool stemmable(std::string_view word) {
  return !word.empty() &&
         std::all_of(word.begin(), word.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '\''; });
}

}  // namespace

std::string_view to_string(TokenPattern p) {
  switch (p) {
    case TokenPattern::AlphaOnly: return "alpha_only";
    case TokenPattern::AlnumLeadingLetter: return "alnum_leading_letter";
    case TokenPattern::AlnumWithPaths: return "alnum_with_paths";
  }
  return "alnum_with_paths";
}

TokenPattern token_pattern_from_string(std::string_view s) {
  if (s == "alpha_only") return TokenPattern::AlphaOnly;
  if (s == "alnum_leading_letter") return TokenPattern::AlnumLeadingLetter;
  if (s == "alnum_with_paths") return TokenPattern::AlnumWithPaths;
  throw InvalidInput("unknown token pattern '" + std::string(s) +
                     "' (expected alpha_only, alnum_leading_letter or alnum_with_paths)");
}

CleanConfig CleanConfig::from_json(const nlohmann::json& j) {
  CleanConfig c;
  if (!j.is_object()) throw InvalidInput("clean config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "domain_stopwords") {
      c.domain_stopwords = value.get<std::set<std::string>>();
    } else if (key == "bigrams") {
      c.bigrams = value.get<std::vector<std::vector<std::string>>>();
      for (const auto& b : c.bigrams)
        if (b.size() < 2) throw InvalidInput("bigram entries need at least two words");
    } else if (key == "footer_pattern") {
      c.footer_pattern = value.get<std::string>();
    } else if (key == "remove_english_stopwords") {
      c.remove_english_stopwords = value.get<bool>();
    } else if (key == "token_pattern") {
      c.token_pattern = token_pattern_from_string(value.get<std::string>());
    } else {
      throw InvalidInput("unknown clean config key '" + key + "'");
    }
  }
  return c;
}

nlohmann::json CleanConfig::to_json() const {
  return {{"domain_stopwords", domain_stopwords},
          {"bigrams", bigrams},
          {"footer_pattern", footer_pattern},
          {"remove_english_stopwords", remove_english_stopwords},
          {"token_pattern", std::string(to_string(token_pattern))}};
}

namespace steps {

std::string strip_non_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (static_cast<unsigned char>(c) < 0x80) out += c;
  return out;
}

std::string replace_footer(std::string_view s, const std::string& pattern) {
  if (pattern.empty()) return std::string(s);
  static thread_local std::string cached_pattern;
  static thread_local boost::regex cached;
  if (pattern != cached_pattern) {
    try {
      cached = boost::regex(pattern, kPythonLike);
    } catch (const boost::regex_error& e) {
      throw InvalidInput("invalid footer pattern: " + std::string(e.what()));
    }
    cached_pattern = pattern;
  }
  return boost::regex_replace(std::string(s), cached, " footer ");
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string remove_domain_stopwords(std::string_view s, const std::set<std::string>& words) {
  if (words.empty()) return std::string(s);
  std::string alternatives;
  // Longest first so a word never shadows a longer one sharing its prefix.
  std::vector<std::string> sorted(words.begin(), words.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& w : sorted) {
    if (!alternatives.empty()) alternatives += '|';
    alternatives += regex_escape(w);
  }
  const boost::regex re("\\b(?:" + alternatives + ")\\b", kPythonLike);
  return boost::regex_replace(std::string(s), re, "");
}

std::string replace_phone_numbers(std::string_view s) {
  return boost::regex_replace(std::string(s), phone_regex(), " phone_number ");
}

std::string preserve_addresses(std::string_view s) {
  std::string out = boost::regex_replace(std::string(s), url_scheme_regex(), "http_");
  for (char& c : out)
    if (c == '@' || c == '-') c = '_';
  return out;
}

std::string remove_symbols(std::string_view s) {
  // A replacement can expose a new ". " pair ("x.. y"), so iterate to a fixpoint.
  std::string cur(s);
  for (;;) {
    std::string next = boost::regex_replace(cur, symbol_regex(), " ");
    if (next == cur) return next;
    cur = std::move(next);
  }
}

std::string replace_hex(std::string_view s) {
  return boost::regex_replace(std::string(s), hex_regex(), " hex_number ");
}

std::string stem_words(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_py_space(s[i])) {
      out += s[i++];
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && !is_py_space(s[i])) ++i;
    const std::string_view word = s.substr(start, i - start);
    if (stemmable(word))
      out += porter2_stem(word);
    else
      out += word;
  }
  return out;
}

std::string join_bigrams(std::string_view s, const std::vector<std::vector<std::string>>& bigrams) {
  if (bigrams.empty()) return std::string(s);
  struct Phrase {
    std::vector<std::string> stems;
    std::string joined;
  };
  std::vector<Phrase> phrases;
  for (const auto& words : bigrams) {
    Phrase p;
    std::vector<std::string> lowered;
    for (const auto& w : words) {
      lowered.push_back(lowercase(w));
      p.stems.push_back(porter2_stem(lowered.back()));
    }
    p.joined = join(lowered, "_");
    phrases.push_back(std::move(p));
  }
  std::stable_sort(phrases.begin(), phrases.end(),
                   [](const Phrase& a, const Phrase& b) { return a.stems.size() > b.stems.size(); });

  const std::vector<std::string> words = split_py_whitespace(s);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size();) {
    const Phrase* hit = nullptr;
    for (const auto& p : phrases) {
      if (i + p.stems.size() > words.size()) continue;
      if (std::equal(p.stems.begin(), p.stems.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
        hit = &p;
        break;
      }
    }
    if (hit) {
      out.push_back(hit->joined);
      i += hit->stems.size();
    } else {
      out.push_back(words[i++]);
    }
  }
  return join(out, " ");
}

std::string collapse_whitespace(std::string_view s) { return join(split_py_whitespace(s), " "); }

}  // namespace steps

std::string clean(std::string_view text, const CleanConfig& config) {
  std::string s = steps::strip_non_ascii(text);
  s = steps::replace_footer(s, config.footer_pattern);
  s = steps::lowercase(s);
  s = steps::remove_domain_stopwords(s, config.domain_stopwords);
  s = steps::replace_phone_numbers(s);
  s = steps::preserve_addresses(s);
  s = steps::remove_symbols(s);
  s = steps::replace_hex(s);
  s = steps::stem_words(s);
  s = steps::join_bigrams(s, config.bigrams);
  return steps::collapse_whitespace(s);
}

bool matches_pattern(std::string_view token, TokenPattern pattern) {
  if (token.size() < 2) return false;
  const auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  switch (pattern) {
    case TokenPattern::AlphaOnly:
      return std::all_of(token.begin(), token.end(), lower);
    case TokenPattern::AlnumLeadingLetter:
      return lower(token[0]) && std::all_of(token.begin() + 1, token.end(), is_word_char);
    case TokenPattern::AlnumWithPaths: {
      const char c0 = token[0];
      if (!((c0 >= 'a' && c0 <= 'z') || (c0 >= 'A' && c0 <= 'Z') || c0 == '/')) return false;
      return std::all_of(token.begin() + 1, token.end(), [](char c) {
        return is_word_char(c) || c == '/' || c == '?' || c == '.' || c == '=';
      });
    }
  }
  return false;
}

std::vector<std::string> tokenize(std::string_view clean_text, TokenPattern pattern) {
  // Whitespace-anchored matching: a token is a maximal non-space run that the
  // pattern matches in full.
  std::vector<std::string> out;
  for (auto& run : split_py_whitespace(clean_text))
    if (matches_pattern(run, pattern)) out.push_back(std::move(run));
  return out;
}

const std::set<std::string>& english_stopwords_stemmed() {
  static const std::set<std::string> words = [] {
    std::set<std::string> s;
    for (const auto& w : english_stopwords()) {
      s.insert(w);
      s.insert(porter2_stem(w));
    }
    return s;
  }();
  return words;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const std::set<std::string>& stopwords) {
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

std::vector<std::string> DocPrep::tokens(std::string_view raw_text, const CleanConfig& config) const {
  return tokens_from_clean(clean(raw_text, config), config);
}

std::vector<std::string> DocPrep::tokens_from_clean(std::string_view clean_text,
                                                    const CleanConfig& config) const {
  auto toks = tokenize(clean_text, pattern);
  if (remove_stopwords || config.remove_english_stopwords)
    toks = textprep::remove_stopwords(std::move(toks), english_stopwords_stemmed());
  return toks;
}

nlohmann::json DocPrep::to_json() const {
  return {{"token_pattern", std::string(to_string(pattern))}, {"remove_stopwords", remove_stopwords}};
}

DocPrep DocPrep::from_json(const nlohmann::json& j) {
  DocPrep p;
  p.pattern = token_pattern_from_string(j.at("token_pattern").get<std::string>());
  p.remove_stopwords = j.at("remove_stopwords").get<bool>();
  return p;
}

}  // namespace ticketscope::textprep
