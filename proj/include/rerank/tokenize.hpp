#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rerank {

// Normalization applied before any lexical metric. Normalized output is a
// pure function of (text, config).
struct TokenizerConfig {
  bool lowercase = true;
  bool stem = false;            // Porter-style stemming
  bool drop_stopwords = false;  // small built-in English list
};

using TokenSequence = std::vector<std::string>;

// Splits into maximal runs of ASCII alphanumerics; everything else separates.
TokenSequence tokenize(std::string_view text, const TokenizerConfig& config = {});

// Porter stemmer. Expects a lowercase word; tokens containing non-letters
// are returned unchanged.
std::string porter_stem(std::string word);

bool is_stopword(std::string_view token);

}  // namespace rerank
