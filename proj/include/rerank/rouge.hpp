#pragma once

#include <functional>
#include <string>

#include "rerank/tokenize.hpp"

namespace rerank {

struct MetricScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// f1 = 2pr/(p+r), zero when p+r == 0.
MetricScore make_metric_score(double precision, double recall);

// Clipped n-gram overlap F1. Degenerate inputs (either side shorter than n)
// yield an all-zero score.
MetricScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

// Longest-common-subsequence F1.
MetricScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

// Mean of the ROUGE-1/2/L F1 values.
double rouge_avg(const TokenSequence& candidate, const TokenSequence& reference);

// Candidate quality in [0, 1]; higher is better.
using QualityMetric =
    std::function<double(const TokenSequence&, const TokenSequence&)>;

// Registry by name: "rouge_avg" (default), "rouge1", "rouge2", "rougel".
QualityMetric quality_metric(const std::string& name);

// 1 - M(candidate, reference); M clamped into [0, 1].
double cost(const TokenSequence& candidate, const TokenSequence& reference,
            const QualityMetric& metric);

}  // namespace rerank
