#pragma once

#include <cstdint>
#include <vector>

#include "rerank/embedder.hpp"
#include "rerank/pool.hpp"

namespace rerank {

// Synthetic pools: documents from a content vocabulary, references as leading
// document sentences, candidates as progressively corrupted reference copies
// (token deletion/substitution from a disjoint noise vocabulary), so true
// lexical quality is monotone in the noise level by construction.
struct SyntheticConfig {
  int n_docs = 100;
  int m_candidates = 8;
  std::vector<double> noise_levels = {0.0, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95};

  // Candidates appended past m_candidates that keep high lexical overlap but
  // are pushed below the given embedder similarity against the reference
  // (substitution-only corruption, rate raised until the bound holds).
  int fp_per_pool = 0;
  double fp_corrupt_rate = 0.3;
  double fp_max_similarity = 0.85;

  int min_sentences = 4;
  int max_sentences = 6;
  int min_tokens_per_sentence = 6;
  int max_tokens_per_sentence = 10;
  int reference_sentences = 2;
  double deletion_share = 0.3;  // corruption events that delete instead of substitute

  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  Corpus pools;
  std::vector<std::vector<int>> fp_indices;  // per pool, injected candidate slots
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config);

// Convenience with defaults for everything but the stated knobs.
SyntheticCorpus generate_synthetic_corpus(int n_docs, int m_candidates,
                                          const std::vector<double>& noise_levels,
                                          std::uint64_t seed);

// Mean rouge_avg against the reference, grouped by noise level slot; used by
// the generator's post-check and exposed for tests.
std::vector<double> mean_quality_per_level(const SyntheticCorpus& corpus,
                                           int n_levels);

}  // namespace rerank
