#include "rerank/rouge.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace rerank {

namespace {

// n-grams keyed by joining tokens with an unlikely separator byte.
std::unordered_map<std::string, int> ngram_counts(const TokenSequence& tokens,
                                                  int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key.append(tokens[i + j]);
    }
    ++counts[key];
  }
  return counts;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  // Two-row dynamic program; rows indexed by b.
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

}  // namespace

MetricScore make_metric_score(double precision, double recall) {
  MetricScore s;
  s.precision = precision;
  s.recall = recall;
  s.f1 = precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
  return s;
}

MetricScore rouge_n(const TokenSequence& candidate,
                    const TokenSequence& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  if (cand.empty() || ref.empty()) return {};

  std::size_t cand_total = candidate.size() - n + 1;
  std::size_t ref_total = reference.size() - n + 1;
  std::size_t matched = 0;
  for (const auto& [gram, count] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return make_metric_score(static_cast<double>(matched) / cand_total,
                           static_cast<double>(matched) / ref_total);
}

MetricScore rouge_l(const TokenSequence& candidate,
                    const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  return make_metric_score(lcs / candidate.size(), lcs / reference.size());
}

double rouge_avg(const TokenSequence& candidate,
                 const TokenSequence& reference) {
  return (rouge_n(candidate, reference, 1).f1 +
          rouge_n(candidate, reference, 2).f1 +
          rouge_l(candidate, reference).f1) /
         3.0;
}

QualityMetric quality_metric(const std::string& name) {
  if (name == "rouge_avg") {
    return [](const TokenSequence& c, const TokenSequence& r) {
      return rouge_avg(c, r);
    };
  }
  if (name == "rouge1" || name == "rouge2") {
    const int n = name == "rouge1" ? 1 : 2;
    return [n](const TokenSequence& c, const TokenSequence& r) {
      return rouge_n(c, r, n).f1;
    };
  }
  if (name == "rougel") {
    return [](const TokenSequence& c, const TokenSequence& r) {
      return rouge_l(c, r).f1;
    };
  }
  throw std::invalid_argument("unknown quality metric: " + name);
}

double cost(const TokenSequence& candidate, const TokenSequence& reference,
            const QualityMetric& metric) {
  const double m = std::clamp(metric(candidate, reference), 0.0, 1.0);
  return 1.0 - m;
}

}  // namespace rerank
