#include "ticketscope/stemmer.h"

#include <array>
#include <utility>

namespace ticketscope {

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

// Non-vowels other than w, x and Y: the last letter of a "short syllable".
bool is_short_tail(char c) { return !is_vowel(c) && c != 'w' && c != 'x' && c != 'Y'; }

bool is_valid_li(char c) {
  switch (c) {
    case 'c': case 'd': case 'e': case 'g': case 'h':
    case 'k': case 'm': case 'n': case 'r': case 't':
      return true;
    default:
      return false;
  }
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

template <std::size_t N>
int longest_suffix(std::string_view w, const std::array<std::pair<std::string_view, int>, N>& table,
                   std::size_t& length) {
  int found = 0;
  length = 0;
  for (const auto& [suffix, code] : table) {
    if (suffix.size() >= length && ends_with(w, suffix) && (found == 0 || suffix.size() > length)) {
      found = code;
      length = suffix.size();
    }
  }
  return found;
}

class Porter2 {
 public:
  explicit Porter2(std::string word) : w_(std::move(word)) {}

  std::string run() {
    if (const char* special = exception(); special != nullptr) return special;
    if (w_.size() < 3) return w_;
    prelude();
    mark_regions();
    step_1a();
    // Left untouched once step 1a has run.
    for (std::string_view w : {"inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed"})
      if (w_ == w) return w_;
    step_1b();
    step_1c();
    step_2();
    step_3();
    step_4();
    step_5();
    if (y_found_)
      for (char& c : w_)
        if (c == 'Y') c = 'y';
    return w_;
  }

 private:
  const char* exception() const {
    static constexpr std::array<std::pair<std::string_view, const char*>, 18> kWords{{
        {"andes", "andes"}, {"atlas", "atlas"}, {"bias", "bias"}, {"cosmos", "cosmos"},
        {"dying", "die"}, {"early", "earli"}, {"gently", "gentl"}, {"howe", "howe"},
        {"idly", "idl"}, {"lying", "lie"}, {"news", "news"}, {"only", "onli"},
        {"singly", "singl"}, {"skies", "sky"}, {"skis", "ski"}, {"sky", "sky"},
        {"tying", "tie"}, {"ugly", "ugli"},
    }};
    for (const auto& [word, stem] : kWords)
      if (w_ == word) return stem;
    return nullptr;
  }

  void prelude() {
    if (!w_.empty() && w_[0] == '\'') w_.erase(0, 1);
    if (!w_.empty() && w_[0] == 'y') {
      w_[0] = 'Y';
      y_found_ = true;
    }
    for (std::size_t i = 1; i < w_.size(); ++i) {
      if (w_[i] == 'y' && is_vowel(w_[i - 1])) {
        w_[i] = 'Y';
        y_found_ = true;
      }
    }
  }

  // Position just past the first non-vowel that follows a vowel, from `from`.
  std::size_t region_after(std::size_t from) const {
    std::size_t i = from;
    while (i < w_.size() && !is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    ++i;
    while (i < w_.size() && is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    return i + 1;
  }

  void mark_regions() {
    static constexpr std::array<std::string_view, 3> kPrefixes{"arsen", "commun", "gener"};
    std::size_t prefix = 0;
    for (auto p : kPrefixes)
      if (w_.size() >= p.size() && std::string_view(w_).substr(0, p.size()) == p)
        prefix = std::max(prefix, p.size());
    p1_ = prefix > 0 ? prefix : region_after(0);
    p2_ = p1_ >= w_.size() ? w_.size() : region_after(p1_);
  }

  bool in_r1(std::size_t pos) const { return pos >= p1_; }
  bool in_r2(std::size_t pos) const { return pos >= p2_; }

  // Short syllable ending exactly at `end` (exclusive).
  bool short_syllable_at(std::size_t end) const {
    if (end >= 3 && is_short_tail(w_[end - 1]) && is_vowel(w_[end - 2]) && !is_vowel(w_[end - 3]))
      return true;
    return end == 2 && !is_vowel(w_[1]) && is_vowel(w_[0]);
  }

  void replace_tail(std::size_t suffix_len, std::string_view with) {
    w_.replace(w_.size() - suffix_len, suffix_len, with);
  }

  bool has_vowel_before(std::size_t end) const {
    for (std::size_t i = 0; i < end; ++i)
      if (is_vowel(w_[i])) return true;
    return false;
  }

  void step_1a() {
    for (std::string_view s : {"'s'", "'s", "'"}) {
      if (ends_with(w_, s)) {
        w_.resize(w_.size() - s.size());
        break;
      }
    }
    static constexpr std::array<std::pair<std::string_view, int>, 6> kTable{{
        {"ied", 2}, {"s", 3}, {"ies", 2}, {"sses", 1}, {"ss", -1}, {"us", -1},
    }};
    std::size_t len = 0;
    const int code = longest_suffix(w_, kTable, len);
    const std::size_t start = w_.size() - len;
    switch (code) {
      case 1:
        replace_tail(len, "ss");
        break;
      case 2:
        replace_tail(len, start >= 2 ? "i" : "ie");
        break;
      case 3:
        // Delete s when a vowel occurs before the letter preceding it.
        if (start >= 1 && has_vowel_before(start - 1)) w_.pop_back();
        break;
      default:
        break;
    }
  }

  void step_1b() {
    static constexpr std::array<std::pair<std::string_view, int>, 6> kTable{{
        {"ed", 2}, {"eed", 1}, {"ing", 3}, {"edly", 2}, {"eedly", 1}, {"ingly", 2},
    }};
    std::size_t len = 0;
    const int code = longest_suffix(w_, kTable, len);
    if (code == 0) return;
    const std::size_t start = w_.size() - len;
    if (code == 1) {
      if (in_r1(start)) replace_tail(len, "ee");
      return;
    }
    if (!has_vowel_before(start)) return;
    w_.resize(start);

    if (ends_with(w_, "at") || ends_with(w_, "bl") || ends_with(w_, "iz")) {
      w_ += 'e';
      return;
    }
    for (std::string_view dbl : {"bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"}) {
      if (ends_with(w_, dbl)) {
        w_.pop_back();
        return;
      }
    }
    if (w_.size() == p1_ && short_syllable_at(w_.size())) w_ += 'e';
  }

  void step_1c() {
    const std::size_t n = w_.size();
    if (n < 3) return;
    if ((w_[n - 1] == 'y' || w_[n - 1] == 'Y') && !is_vowel(w_[n - 2])) w_[n - 1] = 'i';
  }

  void step_2() {
    static constexpr std::array<std::pair<std::string_view, int>, 24> kTable{{
        {"anci", 3}, {"enci", 2}, {"ogi", 14}, {"li", 16}, {"bli", 12},
        {"abli", 4}, {"alli", 8}, {"fulli", 9}, {"lessli", 15}, {"ousli", 10},
        {"entli", 5}, {"aliti", 8}, {"biliti", 12}, {"iviti", 11}, {"tional", 1},
        {"ational", 7}, {"alism", 8}, {"ation", 7}, {"ization", 6}, {"izer", 6},
        {"ator", 7}, {"iveness", 11}, {"fulness", 9}, {"ousness", 10},
    }};
    std::size_t len = 0;
    const int code = longest_suffix(w_, kTable, len);
    if (code == 0) return;
    const std::size_t start = w_.size() - len;
    if (!in_r1(start)) return;
    static constexpr std::array<std::string_view, 16> kReplacement{
        "",    "tion", "ence", "ance", "able", "ent", "ize",  "ate",
        "al",  "ful",  "ous",  "ive",  "ble",  "",    "og", "less"};
    if (code == 14) {
      if (start >= 1 && w_[start - 1] == 'l') replace_tail(len, "og");
    } else if (code == 16) {
      if (start >= 1 && is_valid_li(w_[start - 1])) w_.resize(start);
    } else {
      replace_tail(len, kReplacement[static_cast<std::size_t>(code)]);
    }
  }

  void step_3() {
    static constexpr std::array<std::pair<std::string_view, int>, 9> kTable{{
        {"icate", 4}, {"ative", 6}, {"alize", 3}, {"iciti", 4}, {"ical", 4},
        {"tional", 1}, {"ational", 2}, {"ful", 5}, {"ness", 5},
    }};
    std::size_t len = 0;
    const int code = longest_suffix(w_, kTable, len);
    if (code == 0) return;
    const std::size_t start = w_.size() - len;
    if (!in_r1(start)) return;
    switch (code) {
      case 1: replace_tail(len, "tion"); break;
      case 2: replace_tail(len, "ate"); break;
      case 3: replace_tail(len, "al"); break;
      case 4: replace_tail(len, "ic"); break;
      case 5: w_.resize(start); break;
      case 6:
        if (in_r2(start)) w_.resize(start);
        break;
      default: break;
    }
  }

  void step_4() {
    static constexpr std::array<std::pair<std::string_view, int>, 18> kTable{{
        {"ic", 1}, {"ance", 1}, {"ence", 1}, {"able", 1}, {"ible", 1}, {"ate", 1},
        {"ive", 1}, {"ize", 1}, {"iti", 1}, {"al", 1}, {"ism", 1}, {"ion", 2},
        {"er", 1}, {"ous", 1}, {"ant", 1}, {"ent", 1}, {"ment", 1}, {"ement", 1},
    }};
    std::size_t len = 0;
    const int code = longest_suffix(w_, kTable, len);
    if (code == 0) return;
    const std::size_t start = w_.size() - len;
    if (!in_r2(start)) return;
    if (code == 1) {
      w_.resize(start);
    } else if (start >= 1 && (w_[start - 1] == 's' || w_[start - 1] == 't')) {
      w_.resize(start);
    }
  }

  void step_5() {
    if (w_.empty()) return;
    const std::size_t start = w_.size() - 1;
    if (w_.back() == 'e') {
      if (in_r2(start) || (in_r1(start) && !short_syllable_at(start))) w_.resize(start);
    } else if (w_.back() == 'l') {
      if (in_r2(start) && start >= 1 && w_[start - 1] == 'l') w_.resize(start);
    }
  }

  std::string w_;
  std::size_t p1_ = 0;
  std::size_t p2_ = 0;
  bool y_found_ = false;
};

}  // namespace

std::string porter2_stem(std::string_view word) { return Porter2(std::string(word)).run(); }

}  // namespace ticketscope
