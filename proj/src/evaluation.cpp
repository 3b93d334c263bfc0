#include "rerank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

#include "rerank/parallel.hpp"

namespace rerank {

namespace {

void check_ranked(const RankedPool& pool) {
  const std::size_t m = pool.lexical.size();
  if (pool.semantic.size() != m || pool.order.size() != m) {
    throw std::invalid_argument("ranked pool: order/quality sizes disagree");
  }
  std::vector<bool> seen(m, false);
  for (std::size_t idx : pool.order) {
    if (idx >= m || seen[idx]) {
      throw std::invalid_argument("ranked pool: order is not a permutation");
    }
    seen[idx] = true;
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string source_label(std::size_t cached, std::size_t total) {
  if (total == 0 || cached == total) return "sidecar";
  if (cached == 0) return "computed";
  return "mixed";
}

}  // namespace

std::string csv_escape(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<double> pool_qualities(const CandidatePool& pool,
                                   const QualityMetric& metric,
                                   const TokenizerConfig& tok) {
  if (pool.cached_quality) return *pool.cached_quality;
  const TokenSequence ref = tokenize(pool.reference, tok);
  std::vector<double> out;
  out.reserve(pool.candidates.size());
  for (const std::string& candidate : pool.candidates) {
    out.push_back(metric(tokenize(candidate, tok), ref));
  }
  return out;
}

std::vector<double> pool_semantics(const CandidatePool& pool,
                                   const Embedder& token_embedder,
                                   const TokenizerConfig& tok) {
  if (pool.cached_semantic) return *pool.cached_semantic;
  const TokenSequence ref = tokenize(pool.reference, tok);
  std::vector<double> out;
  out.reserve(pool.candidates.size());
  for (const std::string& candidate : pool.candidates) {
    out.push_back(greedy_semantic_f1(tokenize(candidate, tok), ref, token_embedder).f1);
  }
  return out;
}

std::vector<std::size_t> ranking_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

int z_statistic(const std::vector<double>& lexical,
                const std::vector<double>& semantic) {
  if (lexical.empty()) throw std::invalid_argument("z_statistic: empty pool");
  if (lexical.size() != semantic.size()) {
    throw std::invalid_argument("z_statistic: quality vectors disagree in length");
  }
  const std::vector<std::size_t> sorted = ranking_order(lexical);
  std::size_t best_pos = 0;
  for (std::size_t pos = 1; pos < sorted.size(); ++pos) {
    if (semantic[sorted[pos]] > semantic[sorted[best_pos]]) best_pos = pos;
  }
  return static_cast<int>(best_pos) + 1;
}

ZDistribution z_distribution(const std::vector<RankedPool>& pools) {
  ZDistribution out;
  std::size_t above_one = 0;
  for (const RankedPool& pool : pools) {
    const int z = z_statistic(pool.lexical, pool.semantic);
    out.per_pool.push_back(z);
    if (out.histogram.size() < static_cast<std::size_t>(z)) {
      out.histogram.resize(static_cast<std::size_t>(z), 0);
    }
    ++out.histogram[static_cast<std::size_t>(z) - 1];
    if (z > 1) ++above_one;
  }
  if (!pools.empty()) {
    out.share_above_one = static_cast<double>(above_one) / static_cast<double>(pools.size());
  }
  return out;
}

TopkQuality topk_quality(const std::vector<RankedPool>& pools, int k) {
  if (k < 1) throw std::invalid_argument("topk_quality: k must be >= 1");
  TopkQuality out;
  if (pools.empty()) return out;
  for (const RankedPool& pool : pools) {
    check_ranked(pool);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                   pool.order.size());
    if (take == 0) throw std::invalid_argument("topk_quality: empty pool");
    double sem = 0.0;
    double lex = 0.0;
    for (std::size_t pos = 0; pos < take; ++pos) {
      sem += pool.semantic[pool.order[pos]];
      lex += pool.lexical[pool.order[pos]];
    }
    out.semantic_at_k += sem / static_cast<double>(take);
    out.lexical_at_k += lex / static_cast<double>(take);
  }
  out.semantic_at_k /= static_cast<double>(pools.size());
  out.lexical_at_k /= static_cast<double>(pools.size());
  return out;
}

RankedPool oracle_order(std::vector<double> lexical, std::vector<double> semantic,
                        OracleBy by) {
  if (lexical.size() != semantic.size()) {
    throw std::invalid_argument("oracle_order: quality vectors disagree in length");
  }
  RankedPool out;
  out.order = ranking_order(by == OracleBy::kLexical ? lexical : semantic);
  out.lexical = std::move(lexical);
  out.semantic = std::move(semantic);
  return out;
}

PairwiseStats pairwise_single(const RankedPool& pool) {
  check_ranked(pool);
  PairwiseStats st;
  const std::size_t m = pool.order.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t hi = pool.order[a];
      const std::size_t lo = pool.order[b];
      const bool lex_up = pool.lexical[hi] > pool.lexical[lo];
      const bool lex_down = pool.lexical[hi] < pool.lexical[lo];
      const bool sem_up = pool.semantic[hi] > pool.semantic[lo];
      const bool sem_down = pool.semantic[hi] < pool.semantic[lo];
      ++st.total_pairs;
      if (lex_up) ++st.lexical_wins;
      if (lex_up && sem_up) ++st.dominant_correct;
      if ((lex_up && sem_up) || (lex_down && sem_down)) ++st.relevant_pairs;
      if (lex_up && sem_down) ++st.fp_pairs;
    }
  }
  st.precision = st.lexical_wins > 0
                     ? static_cast<double>(st.dominant_correct) / static_cast<double>(st.lexical_wins)
                     : 0.0;
  st.recall = st.relevant_pairs > 0
                  ? static_cast<double>(st.dominant_correct) / static_cast<double>(st.relevant_pairs)
                  : 0.0;
  st.f1 = (st.precision + st.recall) > 0.0
              ? 2.0 * st.precision * st.recall / (st.precision + st.recall)
              : 0.0;
  st.fp_rate = st.total_pairs > 0
                   ? static_cast<double>(st.fp_pairs) / static_cast<double>(st.total_pairs)
                   : 0.0;
  return st;
}

PairwiseStats pairwise_f1_fp(const std::vector<RankedPool>& pools) {
  PairwiseStats st;
  for (const RankedPool& pool : pools) {
    const PairwiseStats one = pairwise_single(pool);
    st.total_pairs += one.total_pairs;
    st.lexical_wins += one.lexical_wins;
    st.dominant_correct += one.dominant_correct;
    st.relevant_pairs += one.relevant_pairs;
    st.fp_pairs += one.fp_pairs;
  }
  st.precision = st.lexical_wins > 0
                     ? static_cast<double>(st.dominant_correct) / static_cast<double>(st.lexical_wins)
                     : 0.0;
  st.recall = st.relevant_pairs > 0
                  ? static_cast<double>(st.dominant_correct) / static_cast<double>(st.relevant_pairs)
                  : 0.0;
  st.f1 = (st.precision + st.recall) > 0.0
              ? 2.0 * st.precision * st.recall / (st.precision + st.recall)
              : 0.0;
  st.fp_rate = st.total_pairs > 0
                   ? static_cast<double>(st.fp_pairs) / static_cast<double>(st.total_pairs)
                   : 0.0;
  return st;
}

IdenticalScoreStats identical_score_stats(const Corpus& corpus,
                                          const QualityMetric& metric,
                                          const TokenizerConfig& tok) {
  IdenticalScoreStats out;
  out.pools_total = corpus.size();
  for (const CandidatePool& raw : corpus) {
    const CandidatePool pool = dedupe_candidates(raw);
    const std::vector<double> qualities = pool_qualities(pool, metric, tok);
    std::unordered_set<long long> seen;
    bool counted = false;
    for (double q : qualities) {
      const long long key = std::llround(q * 1e4);
      if (!seen.insert(key).second) {
        counted = true;
        break;
      }
    }
    if (counted) ++out.pools_with_duplicates;
  }
  if (out.pools_total > 0) {
    out.rate = static_cast<double>(out.pools_with_duplicates) /
               static_cast<double>(out.pools_total);
  }
  return out;
}

RankingReport aggregate_report(const Corpus& corpus,
                               const std::vector<RankedPool>& ranked,
                               const std::string& metric,
                               const TokenizerConfig& tok) {
  if (corpus.size() != ranked.size()) {
    throw std::invalid_argument("aggregate_report: corpus/ranked size mismatch");
  }
  RankingReport report;
  report.pools = ranked.size();

  const ZDistribution z = z_distribution(ranked);
  report.z_histogram = z.histogram;
  report.z_share_above_one = z.share_above_one;
  for (int k : {1, 3, 5}) {
    const TopkQuality top = topk_quality(ranked, k);
    report.bs_at_k[k] = top.semantic_at_k;
    report.r_at_k[k] = top.lexical_at_k;
  }
  const PairwiseStats pairs = pairwise_f1_fp(ranked);
  report.f1 = pairs.f1;
  report.fp_rate = pairs.fp_rate;
  report.identical_score_rate =
      identical_score_stats(corpus, quality_metric(metric), tok).rate;

  std::size_t cached_quality = 0;
  std::size_t cached_semantic = 0;
  for (const CandidatePool& pool : corpus) {
    if (pool.cached_quality) ++cached_quality;
    if (pool.cached_semantic) ++cached_semantic;
  }
  report.lexical_source = source_label(cached_quality, corpus.size());
  report.semantic_source = source_label(cached_semantic, corpus.size());
  return report;
}

RankingReport build_report(const Corpus& corpus, const CandidateScorer& scorer,
                           const std::string& metric, const TokenizerConfig& tok,
                           int workers) {
  const QualityMetric m = quality_metric(metric);
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, tok);
  std::vector<RankedPool> ranked(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    RankedPool& slot = ranked[i];
    slot.order = ranking_order(scorer.score(corpus[i]));
    slot.lexical = pool_qualities(corpus[i], m, tok);
    slot.semantic = pool_semantics(corpus[i], embedder, tok);
  });
  return aggregate_report(corpus, ranked, metric, tok);
}

std::string render_report_json(const RankingReport& report) {
  nlohmann::ordered_json j;
  j["pools"] = report.pools;
  j["z_histogram"] = report.z_histogram;
  j["z_share_above_one"] = report.z_share_above_one;
  nlohmann::ordered_json bs;
  nlohmann::ordered_json r;
  for (const auto& [k, v] : report.bs_at_k) bs[std::to_string(k)] = v;
  for (const auto& [k, v] : report.r_at_k) r[std::to_string(k)] = v;
  j["bs_at_k"] = std::move(bs);
  j["r_at_k"] = std::move(r);
  j["f1"] = report.f1;
  j["fp_rate"] = report.fp_rate;
  j["identical_score_rate"] = report.identical_score_rate;
  j["lexical_source"] = report.lexical_source;
  j["semantic_source"] = report.semantic_source;
  return j.dump(2) + "\n";
}

std::string render_pool_csv(const Corpus& corpus,
                            const std::vector<RankedPool>& ranked) {
  if (corpus.size() != ranked.size()) {
    throw std::invalid_argument("render_pool_csv: corpus/ranked size mismatch");
  }
  std::string out = "id,candidates,z,top1_lexical,top1_semantic,pairs,fp_pairs\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const RankedPool& pool = ranked[i];
    const PairwiseStats pairs = pairwise_single(pool);
    const std::size_t best = pool.order.empty() ? 0 : pool.order[0];
    out += csv_escape(corpus[i].document.id);
    out += ',' + std::to_string(pool.order.size());
    out += ',' + std::to_string(z_statistic(pool.lexical, pool.semantic));
    out += ',' + fixed6(pool.lexical.empty() ? 0.0 : pool.lexical[best]);
    out += ',' + fixed6(pool.semantic.empty() ? 0.0 : pool.semantic[best]);
    out += ',' + std::to_string(pairs.total_pairs);
    out += ',' + std::to_string(pairs.fp_pairs);
    out += '\n';
  }
  return out;
}

std::string render_histogram_csv(const RankingReport& report) {
  std::string out = "rank,count,share\n";
  const double total = report.pools > 0 ? static_cast<double>(report.pools) : 1.0;
  for (std::size_t r = 0; r < report.z_histogram.size(); ++r) {
    out += std::to_string(r + 1);
    out += ',' + std::to_string(report.z_histogram[r]);
    out += ',' + fixed6(static_cast<double>(report.z_histogram[r]) / total);
    out += '\n';
  }
  return out;
}

}  // namespace rerank
