#include "rerank/embedder.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "rerank/error.hpp"
#include "rerank/rng.hpp"

namespace rerank {

namespace {

constexpr double kZeroNormEps = 1e-12;

}  // namespace

int HashedBowEmbedder::bucket(std::string_view token) const {
  return static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(dim_));
}

Eigen::VectorXd HashedBowEmbedder::embed(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const std::string& token : tokenize(text, tok_)) {
    v[bucket(token)] += 1.0;
  }
  const double norm = v.norm();
  if (norm > kZeroNormEps) v /= norm;
  return v;
}

double semantic_similarity(std::string_view a, std::string_view b,
                           const Embedder& embedder) {
  const Eigen::VectorXd va = embedder.embed(a);
  const Eigen::VectorXd vb = embedder.embed(b);
  if (va.norm() < kZeroNormEps || vb.norm() < kZeroNormEps) {
    throw NumericError("semantic_similarity: zero-vector embedding");
  }
  return va.dot(vb);
}

MetricScore greedy_semantic_f1(const TokenSequence& candidate,
                               const TokenSequence& reference,
                               const Embedder& token_embedder) {
  if (candidate.empty() || reference.empty()) return {};

  const auto embed_all = [&](const TokenSequence& tokens) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(token_embedder.embed(t));
    return out;
  };
  const auto cand = embed_all(candidate);
  const auto ref = embed_all(reference);

  const auto mean_best = [](const std::vector<Eigen::VectorXd>& from,
                            const std::vector<Eigen::VectorXd>& to) {
    double total = 0.0;
    for (const auto& f : from) {
      double best = -1.0;
      for (const auto& t : to) best = std::max(best, f.dot(t));
      total += best;
    }
    return total / static_cast<double>(from.size());
  };
  return make_metric_score(mean_best(cand, ref), mean_best(ref, cand));
}

}  // namespace rerank
