#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rerank {

// The self-weighted similarity is undefined when the per-sentence scores sum
// to (near) zero; below this magnitude the weights fall back to uniform.
inline constexpr double kWeightGuardEps = 1e-8;

// Per-sentence scores: inner products of the summary vector against each
// document sentence vector (columns of doc_vectors).
template <typename SummaryT, typename DocT>
Eigen::Vector<typename SummaryT::Scalar, Eigen::Dynamic> sentence_scores(
    const Eigen::MatrixBase<SummaryT>& summary,
    const Eigen::MatrixBase<DocT>& doc_vectors) {
  if (summary.size() != doc_vectors.rows()) {
    throw std::invalid_argument(
        "sentence_scores: summary dimension " + std::to_string(summary.size()) +
        " does not match document dimension " + std::to_string(doc_vectors.rows()));
  }
  return doc_vectors.transpose() * summary;
}

struct SimilarityScore {
  Eigen::VectorXd per_sentence;
  Eigen::VectorXd weights;
  double total = 0.0;
  bool uniform_fallback = false;  // guard hit: weights forced to 1/K
};

// Self-weighted combination: total = sum_k w_k * s_k with w_k = s_k / sum_j s_j.
// Weights are scale-invariant, so the total is positively homogeneous in the
// scores.
template <typename Derived>
SimilarityScore similarity_from_scores(const Eigen::MatrixBase<Derived>& scores,
                                       double guard_eps = kWeightGuardEps) {
  SimilarityScore out;
  out.per_sentence = scores.template cast<double>();
  const double denom = out.per_sentence.sum();
  const auto k = out.per_sentence.size();
  if (k == 0) throw std::invalid_argument("similarity: no per-sentence scores");
  if (std::abs(denom) < guard_eps) {
    out.uniform_fallback = true;
    out.weights = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  } else {
    out.weights = out.per_sentence / denom;
  }
  out.total = out.weights.dot(out.per_sentence);
  return out;
}

template <typename SummaryT, typename DocT>
SimilarityScore similarity(const Eigen::MatrixBase<SummaryT>& summary,
                           const Eigen::MatrixBase<DocT>& doc_vectors,
                           double guard_eps = kWeightGuardEps) {
  return similarity_from_scores(sentence_scores(summary, doc_vectors), guard_eps);
}

// d total / d s_k. Off the guard: total = sum s^2 / sum s, so the partial is
// (2 s_k - total) / sum s. On the guard branch the weights are constants 1/K.
template <typename Derived>
Eigen::VectorXd similarity_grad_scores(const Eigen::MatrixBase<Derived>& scores,
                                       double guard_eps = kWeightGuardEps) {
  const Eigen::VectorXd s = scores.template cast<double>();
  const double denom = s.sum();
  const auto k = s.size();
  if (std::abs(denom) < guard_eps) {
    return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  }
  const double total = s.squaredNorm() / denom;
  return (2.0 * s.array() - total).matrix() / denom;
}

struct SimilarityGrad {
  Eigen::VectorXd d_summary;
  Eigen::MatrixXd d_doc;
};

// Chain rule through the scores down to the summary and document vectors.
template <typename SummaryT, typename DocT>
SimilarityGrad similarity_backward(const Eigen::MatrixBase<SummaryT>& summary,
                                   const Eigen::MatrixBase<DocT>& doc_vectors,
                                   double upstream = 1.0,
                                   double guard_eps = kWeightGuardEps) {
  const Eigen::VectorXd ds =
      upstream * similarity_grad_scores(sentence_scores(summary, doc_vectors), guard_eps);
  SimilarityGrad grad;
  grad.d_summary = doc_vectors * ds;
  grad.d_doc = summary * ds.transpose();
  return grad;
}

enum class AblationMode { kFirstCls, kAverage, kWeighted };

inline AblationMode ablation_mode_from_name(const std::string& name) {
  if (name == "first_cls") return AblationMode::kFirstCls;
  if (name == "average") return AblationMode::kAverage;
  if (name == "weighted") return AblationMode::kWeighted;
  throw std::invalid_argument("unknown ablation mode: " + name);
}

// Architecture-ablation totals: the first sentence score alone, the plain
// mean, or the self-weighted combination.
template <typename Derived>
double ablation_similarity(const Eigen::MatrixBase<Derived>& scores,
                           AblationMode mode,
                           double guard_eps = kWeightGuardEps) {
  if (scores.size() == 0) throw std::invalid_argument("ablation_similarity: no scores");
  switch (mode) {
    case AblationMode::kFirstCls:
      return static_cast<double>(scores[0]);
    case AblationMode::kAverage:
      return static_cast<double>(scores.sum()) / static_cast<double>(scores.size());
    case AblationMode::kWeighted:
      return similarity_from_scores(scores, guard_eps).total;
  }
  throw std::invalid_argument("ablation_similarity: bad mode");
}

// Index of the maximum; ties resolve to the lowest index.
template <typename Derived>
std::size_t select_best(const Eigen::MatrixBase<Derived>& totals) {
  if (totals.size() == 0) throw std::invalid_argument("select_best: empty scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < static_cast<std::size_t>(totals.size()); ++i) {
    if (totals[static_cast<Eigen::Index>(i)] > totals[static_cast<Eigen::Index>(best)]) {
      best = i;
    }
  }
  return best;
}

inline std::size_t select_best(const std::vector<double>& totals) {
  return select_best(Eigen::Map<const Eigen::VectorXd>(totals.data(), totals.size()));
}

}  // namespace rerank
