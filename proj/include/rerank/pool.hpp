#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rerank {

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> sentences;  // concatenate (modulo whitespace) to text
};

// One source document with its reference summary and candidate pool.
// cached_quality / cached_semantic, when present, hold one value per
// candidate (typically attached from a scores sidecar).
struct CandidatePool {
  Document document;
  std::string reference;
  std::vector<std::string> candidates;
  std::optional<std::vector<double>> cached_quality;
  std::optional<std::vector<double>> cached_semantic;
  std::optional<std::vector<double>> model_scores;  // from a "scores" field, e.g. rank output
};

using Corpus = std::vector<CandidatePool>;

struct NegativeSet {
  std::vector<std::string> summaries;
  std::vector<std::string> source_ids;  // pool each summary came from
};

// Splits on sentence-final punctuation (. ! ?) followed by whitespace.
std::vector<std::string> segment_sentences(const std::string& text);

// JSONL, one pool per line:
//   {"id": str, "document": str, "sentences": [str]?, "reference": str,
//    "candidates": [str]}
// Malformed records raise DataError naming the line and field; duplicate ids
// raise DataError. Supplied sentences take precedence over segmentation and
// must concatenate (modulo whitespace) to the document text.
void for_each_pool(const std::filesystem::path& path,
                   const std::function<void(CandidatePool&&)>& sink);
Corpus load_pools(const std::filesystem::path& path);
void write_pools(const std::filesystem::path& path, const Corpus& corpus);

// Optional sidecar, same ids: {"id": str, "quality": [float], "semantic": [float]}.
void attach_scores(const std::filesystem::path& path, Corpus& corpus);
void write_scores(const std::filesystem::path& path, const Corpus& corpus);

// Removes exact-duplicate candidate texts, keeping first occurrences. Cached
// score entries follow their candidates.
CandidatePool dedupe_candidates(const CandidatePool& pool);

// Uniform sample, without replacement, from other documents' candidates.
// Deterministic given the seed; throws DataError when the rest of the corpus
// holds fewer than `count` candidates.
NegativeSet sample_negatives(const Corpus& corpus, const std::string& anchor_id,
                             int count, std::uint64_t seed);

}  // namespace rerank
