#include "rerank/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rerank {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

const std::array<std::string_view, 36> kStopwords = {
    "a",    "an",   "and",  "are", "as",   "at",   "be",   "but",  "by",
    "for",  "from", "has",  "he",  "her",  "his",  "i",    "in",   "is",
    "it",   "its",  "not",  "of",  "on",   "or",   "she",  "that", "the",
    "their", "these", "they", "this", "those", "to", "was",  "we",   "with"};

// --- Porter stemmer -------------------------------------------------------
//
// Straight rendition of the classical algorithm: measure-based conditions
// over a [C](VC)^m[V] decomposition, five suffix-rewriting steps.

class Porter {
 public:
  explicit Porter(std::string word) : b_(std::move(word)) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_;
  }

 private:
  std::string b_;

  bool consonant(std::size_t i) const {
    const char c = b_[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
    if (c == 'y') return i == 0 ? true : !consonant(i - 1);
    return true;
  }

  // Number of VC sequences in b_[0, end).
  int measure(std::size_t end) const {
    int m = 0;
    std::size_t i = 0;
    while (i < end && consonant(i)) ++i;
    while (i < end) {
      while (i < end && !consonant(i)) ++i;
      if (i >= end) break;
      ++m;
      while (i < end && consonant(i)) ++i;
    }
    return m;
  }

  bool has_vowel(std::size_t end) const {
    for (std::size_t i = 0; i < end; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t end) const {
    return end >= 2 && b_[end - 1] == b_[end - 2] && consonant(end - 1);
  }

  // cvc at the end of b_[0, end), final consonant not w, x or y.
  bool cvc(std::size_t end) const {
    if (end < 3) return false;
    if (!consonant(end - 1) || consonant(end - 2) || !consonant(end - 3))
      return false;
    const char c = b_[end - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const {
    return b_.size() >= suffix.size() &&
           b_.compare(b_.size() - suffix.size(), suffix.size(), suffix) == 0;
  }

  std::size_t stem_len(std::string_view suffix) const {
    return b_.size() - suffix.size();
  }

  void set_suffix(std::string_view suffix, std::string_view replacement) {
    b_.replace(b_.size() - suffix.size(), suffix.size(), replacement);
  }

  // Replace suffix if the measure of the remaining stem is positive.
  bool replace_m0(std::string_view suffix, std::string_view replacement) {
    if (measure(stem_len(suffix)) > 0) set_suffix(suffix, replacement);
    return true;  // suffix matched; the step is over either way
  }

  bool replace_m1(std::string_view suffix, std::string_view replacement) {
    if (measure(stem_len(suffix)) > 1) set_suffix(suffix, replacement);
    return true;
  }

  void step1ab() {
    if (ends("sses")) {
      set_suffix("sses", "ss");
    } else if (ends("ies")) {
      set_suffix("ies", "i");
    } else if (!ends("ss") && ends("s")) {
      b_.pop_back();
    }

    bool removed_ed_ing = false;
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) b_.pop_back();
    } else if (ends("ed") && has_vowel(stem_len("ed"))) {
      set_suffix("ed", "");
      removed_ed_ing = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      set_suffix("ing", "");
      removed_ed_ing = true;
    }

    if (removed_ed_ing) {
      if (ends("at") || ends("bl") || ends("iz")) {
        b_.push_back('e');
      } else if (double_consonant(b_.size())) {
        const char c = b_.back();
        if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
      } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
        b_.push_back('e');
      }
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
  }

  void step2() {
    if (b_.size() < 3) return;
    switch (b_[b_.size() - 2]) {
      case 'a':
        if (ends("ational")) { replace_m0("ational", "ate"); break; }
        if (ends("tional")) { replace_m0("tional", "tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { replace_m0("enci", "ence"); break; }
        if (ends("anci")) { replace_m0("anci", "ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { replace_m0("izer", "ize"); break; }
        break;
      case 'l':
        if (ends("abli")) { replace_m0("abli", "able"); break; }
        if (ends("alli")) { replace_m0("alli", "al"); break; }
        if (ends("entli")) { replace_m0("entli", "ent"); break; }
        if (ends("eli")) { replace_m0("eli", "e"); break; }
        if (ends("ousli")) { replace_m0("ousli", "ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { replace_m0("ization", "ize"); break; }
        if (ends("ation")) { replace_m0("ation", "ate"); break; }
        if (ends("ator")) { replace_m0("ator", "ate"); break; }
        break;
      case 's':
        if (ends("alism")) { replace_m0("alism", "al"); break; }
        if (ends("iveness")) { replace_m0("iveness", "ive"); break; }
        if (ends("fulness")) { replace_m0("fulness", "ful"); break; }
        if (ends("ousness")) { replace_m0("ousness", "ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { replace_m0("aliti", "al"); break; }
        if (ends("iviti")) { replace_m0("iviti", "ive"); break; }
        if (ends("biliti")) { replace_m0("biliti", "ble"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b_.back()) {
      case 'e':
        if (ends("icate")) { replace_m0("icate", "ic"); break; }
        if (ends("ative")) { replace_m0("ative", ""); break; }
        if (ends("alize")) { replace_m0("alize", "al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { replace_m0("iciti", "ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { replace_m0("ical", "ic"); break; }
        if (ends("ful")) { replace_m0("ful", ""); break; }
        break;
      case 's':
        if (ends("ness")) { replace_m0("ness", ""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    if (b_.size() < 3) return;
    switch (b_[b_.size() - 2]) {
      case 'a':
        if (ends("al")) { replace_m1("al", ""); break; }
        break;
      case 'c':
        if (ends("ance")) { replace_m1("ance", ""); break; }
        if (ends("ence")) { replace_m1("ence", ""); break; }
        break;
      case 'e':
        if (ends("er")) { replace_m1("er", ""); break; }
        break;
      case 'i':
        if (ends("ic")) { replace_m1("ic", ""); break; }
        break;
      case 'l':
        if (ends("able")) { replace_m1("able", ""); break; }
        if (ends("ible")) { replace_m1("ible", ""); break; }
        break;
      case 'n':
        if (ends("ant")) { replace_m1("ant", ""); break; }
        if (ends("ement")) { replace_m1("ement", ""); break; }
        if (ends("ment")) { replace_m1("ment", ""); break; }
        if (ends("ent")) { replace_m1("ent", ""); break; }
        break;
      case 'o':
        if (ends("ion")) {
          const std::size_t stem = stem_len("ion");
          if (stem >= 1 && (b_[stem - 1] == 's' || b_[stem - 1] == 't'))
            replace_m1("ion", "");
          break;
        }
        if (ends("ou")) { replace_m1("ou", ""); break; }
        break;
      case 's':
        if (ends("ism")) { replace_m1("ism", ""); break; }
        break;
      case 't':
        if (ends("ate")) { replace_m1("ate", ""); break; }
        if (ends("iti")) { replace_m1("iti", ""); break; }
        break;
      case 'u':
        if (ends("ous")) { replace_m1("ous", ""); break; }
        break;
      case 'v':
        if (ends("ive")) { replace_m1("ive", ""); break; }
        break;
      case 'z':
        if (ends("ize")) { replace_m1("ize", ""); break; }
        break;
      default:
        break;
    }
  }

  void step5() {
    if (b_.back() == 'e') {
      const int m = measure(b_.size() - 1);
      if (m > 1 || (m == 1 && !cvc(b_.size() - 1))) b_.pop_back();
    }
    if (b_.back() == 'l' && double_consonant(b_.size()) &&
        measure(b_.size()) > 1) {
      b_.pop_back();
    }
  }
};

}  // namespace

std::string porter_stem(std::string word) {
  if (!std::all_of(word.begin(), word.end(), [](unsigned char c) {
        return c >= 'a' && c <= 'z';
      })) {
    return word;
  }
  return Porter(std::move(word)).run();
}

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) !=
         kStopwords.end();
}

TokenSequence tokenize(std::string_view text, const TokenizerConfig& config) {
  TokenSequence tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!(config.drop_stopwords && is_stopword(current))) {
      tokens.push_back(config.stem ? porter_stem(std::move(current)) : current);
    }
    current.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_char(c)) {
      current.push_back(config.lowercase
                            ? static_cast<char>(std::tolower(c))
                            : ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace rerank
