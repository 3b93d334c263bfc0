#pragma once

#include <map>
#include <string>
#include <vector>

#include "rerank/config.hpp"
#include "rerank/evaluation.hpp"
#include "rerank/pool.hpp"

namespace rerank {

// One grid point: the coordinate settings, the resolved config, and either a
// full train + evaluate outcome or the error it raised.
struct SweepCell {
  std::map<std::string, std::string> point;
  TrainConfig config;
  bool ok = false;
  std::string error;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double alpha_zero_rate = 0.0;  // share of candidates filtered by phi
  double mean_candidates = 0.0;  // pool size after any truncation
  RankingReport report;
};

// Cartesian product over the grid values (keys sorted, last key fastest).
// Each cell trains from scratch on (a possibly truncated copy of) the corpus
// and evaluates the resulting model; a failing cell records its error and the
// grid moves on. Grid keys are the config keys accepted by apply_setting,
// plus "candidates" to truncate every pool to its first n candidates.
std::vector<SweepCell> sweep(const std::map<std::string, std::vector<std::string>>& grid,
                             const Corpus& corpus, const TrainConfig& base,
                             const Corpus& validation = {});

// Flat table, one row per cell: grid coordinates, losses, filter rate, and
// the headline report numbers.
std::string render_sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace rerank
