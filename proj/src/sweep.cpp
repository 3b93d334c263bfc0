#include "rerank/sweep.hpp"

#include <cstdio>
#include <stdexcept>

#include "rerank/losses.hpp"
#include "rerank/training.hpp"

namespace rerank {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Corpus truncate_candidates(const Corpus& corpus, int cap) {
  if (cap < 1) throw std::invalid_argument("sweep: candidates must be >= 1");
  Corpus out = corpus;
  for (CandidatePool& pool : out) {
    const std::size_t keep =
        std::min<std::size_t>(static_cast<std::size_t>(cap), pool.candidates.size());
    pool.candidates.resize(keep);
    if (pool.cached_quality) pool.cached_quality->resize(keep);
    if (pool.cached_semantic) pool.cached_semantic->resize(keep);
  }
  return out;
}

double alpha_zero_rate(const Corpus& corpus, const TrainConfig& config) {
  if (!config.loss.weighting) return 0.0;
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, config.tokenizer);
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (const CandidatePool& pool : corpus) {
    const std::vector<int> alphas = instance_weights(pool.candidates, pool.reference,
                                                     config.loss.phi, embedder);
    for (int a : alphas) {
      ++total;
      if (a == 0) ++zeros;
    }
  }
  return total > 0 ? static_cast<double>(zeros) / static_cast<double>(total) : 0.0;
}

void run_cell(SweepCell& cell, const Corpus& corpus, const Corpus& validation) {
  int cap = 0;
  TrainConfig config = cell.config;
  for (const auto& [key, value] : cell.point) {
    if (key == "candidates") {
      std::size_t used = 0;
      cap = std::stoi(value, &used);
      if (used != value.size() || cap < 1) {
        throw std::invalid_argument("sweep: candidates expects a positive integer");
      }
    } else {
      apply_setting(config, key, value);
    }
  }
  cell.config = config;

  const Corpus working = cap > 0 ? truncate_candidates(corpus, cap) : corpus;
  const Corpus validation_working =
      cap > 0 && !validation.empty() ? truncate_candidates(validation, cap) : validation;

  std::size_t total_candidates = 0;
  for (const CandidatePool& pool : working) total_candidates += pool.candidates.size();
  cell.mean_candidates = working.empty()
                             ? 0.0
                             : static_cast<double>(total_candidates) /
                                   static_cast<double>(working.size());
  cell.alpha_zero_rate = alpha_zero_rate(working, config);

  const TrainResult result = train(working, config, validation_working);
  cell.initial_loss = result.initial_loss;
  cell.final_loss = result.final_loss;
  const ModelScorer scorer(backend_from_checkpoint(result.best));
  cell.report = build_report(working, scorer, config.metric, config.tokenizer);
  cell.ok = true;
}

}  // namespace

std::vector<SweepCell> sweep(const std::map<std::string, std::vector<std::string>>& grid,
                             const Corpus& corpus, const TrainConfig& base,
                             const Corpus& validation) {
  for (const auto& [key, values] : grid) {
    if (values.empty()) {
      throw std::invalid_argument("sweep: grid key '" + key + "' has no values");
    }
  }

  std::vector<std::string> keys;
  keys.reserve(grid.size());
  for (const auto& [key, values] : grid) keys.push_back(key);

  std::size_t cells_total = 1;
  for (const auto& [key, values] : grid) cells_total *= values.size();

  std::vector<SweepCell> cells;
  cells.reserve(cells_total);
  std::vector<std::size_t> odometer(keys.size(), 0);
  for (std::size_t c = 0; c < cells_total; ++c) {
    SweepCell cell;
    cell.config = base;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      cell.point[keys[k]] = grid.at(keys[k])[odometer[k]];
    }
    try {
      run_cell(cell, corpus, validation);
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
    for (std::size_t k = keys.size(); k-- > 0;) {  // last key fastest
      if (++odometer[k] < grid.at(keys[k]).size()) break;
      odometer[k] = 0;
    }
  }
  return cells;
}

std::string render_sweep_csv(const std::vector<SweepCell>& cells) {
  if (cells.empty()) return "ok,error\n";
  std::string out;
  for (const auto& [key, value] : cells.front().point) out += key + ',';
  out +=
      "ok,error,initial_loss,final_loss,alpha_zero_rate,mean_candidates,"
      "z_share_above_one,bs_at_1,bs_at_3,bs_at_5,r_at_1,r_at_3,r_at_5,"
      "f1,fp_rate,identical_score_rate\n";
  for (const SweepCell& cell : cells) {
    for (const auto& [key, value] : cell.point) out += csv_escape(value) + ',';
    out += cell.ok ? "1," : "0,";
    out += csv_escape(cell.error);
    out += ',' + fixed6(cell.initial_loss);
    out += ',' + fixed6(cell.final_loss);
    out += ',' + fixed6(cell.alpha_zero_rate);
    out += ',' + fixed6(cell.mean_candidates);
    out += ',' + fixed6(cell.report.z_share_above_one);
    for (int k : {1, 3, 5}) {
      const auto it = cell.report.bs_at_k.find(k);
      out += ',' + fixed6(it != cell.report.bs_at_k.end() ? it->second : 0.0);
    }
    for (int k : {1, 3, 5}) {
      const auto it = cell.report.r_at_k.find(k);
      out += ',' + fixed6(it != cell.report.r_at_k.end() ? it->second : 0.0);
    }
    out += ',' + fixed6(cell.report.f1);
    out += ',' + fixed6(cell.report.fp_rate);
    out += ',' + fixed6(cell.report.identical_score_rate);
    out += '\n';
  }
  return out;
}

}  // namespace rerank
