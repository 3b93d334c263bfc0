#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rerank/embedder.hpp"
#include "rerank/encoder.hpp"
#include "rerank/pool.hpp"
#include "rerank/rouge.hpp"
#include "rerank/tokenize.hpp"

namespace rerank {

// Per-candidate lexical quality M; the cached sidecar values win when present.
std::vector<double> pool_qualities(const CandidatePool& pool,
                                   const QualityMetric& metric,
                                   const TokenizerConfig& tok);

// Per-candidate semantic quality: cached sidecar values when present, else the
// greedy token-matching F1 stand-in.
std::vector<double> pool_semantics(const CandidatePool& pool,
                                   const Embedder& token_embedder,
                                   const TokenizerConfig& tok);

// Candidate indices in descending score order; ties keep input order.
std::vector<std::size_t> ranking_order(const std::vector<double>& scores);

// One pool as seen by the ranking analyses: an order over candidates plus
// both quality vectors in original candidate indexing.
struct RankedPool {
  std::vector<std::size_t> order;  // permutation, best first
  std::vector<double> lexical;
  std::vector<double> semantic;
};

// 1-based rank, in the lexical-descending order, of the candidate with the
// highest semantic quality. Lexical ties sort stably; semantic ties resolve
// to the candidate appearing earliest in the sorted order.
int z_statistic(const std::vector<double>& lexical,
                const std::vector<double>& semantic);

struct ZDistribution {
  std::vector<std::size_t> histogram;  // histogram[r-1] = pools with z == r
  std::vector<int> per_pool;
  double share_above_one = 0.0;
};

ZDistribution z_distribution(const std::vector<RankedPool>& pools);

struct TopkQuality {
  double semantic_at_k = 0.0;
  double lexical_at_k = 0.0;
};

// Mean over pools of the mean quality among each pool's top-k candidates
// under its order; pools shorter than k use all their candidates.
TopkQuality topk_quality(const std::vector<RankedPool>& pools, int k);

enum class OracleBy { kLexical, kSemantic };

// Ceiling orders: descending stable sort by one of the quality vectors.
RankedPool oracle_order(std::vector<double> lexical, std::vector<double> semantic,
                        OracleBy by);

struct PairwiseStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fp_rate = 0.0;
  long long total_pairs = 0;
  long long lexical_wins = 0;    // higher-ranked strictly better lexically
  long long dominant_correct = 0;  // higher-ranked strictly better in both
  long long relevant_pairs = 0;  // one side strictly dominates in both
  long long fp_pairs = 0;        // lexical strictly up, semantic strictly down
};

// All-pairs concordance over every pool: precision = dominant-correct /
// lexical-wins, recall = dominant-correct / relevant, f1 their harmonic mean;
// fp_rate = discordant pairs / all pairs. Pools with < 2 candidates
// contribute no pairs.
PairwiseStats pairwise_f1_fp(const std::vector<RankedPool>& pools);
PairwiseStats pairwise_single(const RankedPool& pool);

struct IdenticalScoreStats {
  std::size_t pools_with_duplicates = 0;
  std::size_t pools_total = 0;
  double rate = 0.0;
};

// Share of pools that, after removing duplicate candidate texts, still hold
// at least two candidates with equal quality at 4-decimal rounding.
IdenticalScoreStats identical_score_stats(const Corpus& corpus,
                                          const QualityMetric& metric,
                                          const TokenizerConfig& tok);

struct RankingReport {
  std::size_t pools = 0;
  std::vector<std::size_t> z_histogram;
  double z_share_above_one = 0.0;
  std::map<int, double> bs_at_k;  // semantic@k for k in {1, 3, 5}
  std::map<int, double> r_at_k;   // lexical@k
  double f1 = 0.0;
  double fp_rate = 0.0;
  double identical_score_rate = 0.0;
  std::string lexical_source;   // "sidecar", "computed", or "mixed"
  std::string semantic_source;
};

// Ranks every pool with the scorer and aggregates the full analysis suite.
RankingReport build_report(const Corpus& corpus, const CandidateScorer& scorer,
                           const std::string& metric, const TokenizerConfig& tok,
                           int workers = 1);

// Same aggregation over precomputed ranked pools (scores already applied).
RankingReport aggregate_report(const Corpus& corpus,
                               const std::vector<RankedPool>& ranked,
                               const std::string& metric,
                               const TokenizerConfig& tok);

// Quotes a value for CSV when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& raw);

std::string render_report_json(const RankingReport& report);
// id,candidates,z,top1_lexical,top1_semantic,pairs,fp_pairs per pool.
std::string render_pool_csv(const Corpus& corpus,
                            const std::vector<RankedPool>& ranked);
// rank,count,share rows for external plotting.
std::string render_histogram_csv(const RankingReport& report);

}  // namespace rerank
