#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rerank/config.hpp"
#include "rerank/encoder.hpp"
#include "rerank/pool.hpp"

namespace rerank {

// One optimizer step; losses are batch means. val_metric is filled on the
// steps where a validation pass ran.
struct TrainLogEntry {
  long long step = 0;
  double rank_loss = 0.0;
  double ctr_loss = 0.0;
  double combined = 0.0;
  std::optional<double> val_metric;
};

struct TrainResult {
  Checkpoint best;  // highest validation selection metric; `last` when no validation ran
  Checkpoint last;
  double initial_loss = 0.0;  // full-corpus combined loss before the first update
  double final_loss = 0.0;    // same quantity after the last update
  std::vector<TrainLogEntry> log;
  std::vector<ValidationPoint> history;
};

// Mean quality of the top-scored candidate over `pools`, under both metrics.
// Throws std::invalid_argument on an empty validation set.
ValidationPoint validate(const CandidateScorer& scorer, const Corpus& pools,
                         const std::string& metric, const TokenizerConfig& tok,
                         long long step = 0);
ValidationPoint validate(const Checkpoint& cp, const Corpus& pools);

// Mean combined loss over the corpus at fixed parameters. Negatives come from
// an evaluation-only seed stream, so the value is comparable across calls
// with the same config.
double corpus_loss(const TinyEmbeddingBackend& backend, const Corpus& corpus,
                   const TrainConfig& config);

// Full optimization loop: per-epoch shuffled pools, batched gradient
// accumulation in pool order, seeded negative sampling, periodic validation.
// Identical (corpus, config, validation) inputs give identical results.
// Non-finite losses or gradients raise NumericError naming the batch.
TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const Corpus& validation = {});

}  // namespace rerank
