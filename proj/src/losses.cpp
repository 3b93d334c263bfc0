#include "rerank/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rerank {

namespace {

std::vector<std::size_t> quality_order(const Eigen::VectorXd& qualities) {
  std::vector<std::size_t> order(qualities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return qualities[static_cast<Eigen::Index>(a)] >
           qualities[static_cast<Eigen::Index>(b)];
  });
  return order;
}

void check_batch(const RankedBatch& batch) {
  if (batch.scores.size() != batch.qualities.size()) {
    throw std::invalid_argument("ranking_loss: scores and qualities differ in length");
  }
}

// log(e^{f} / (e^{f} + sum e^{g})) and the softmax probability of f, with
// max-subtraction for stability.
double log_denominator(double f, const Eigen::VectorXd& negs) {
  const double m = negs.size() > 0 ? std::max(f, negs.maxCoeff()) : f;
  double acc = std::exp(f - m);
  for (Eigen::Index s = 0; s < negs.size(); ++s) acc += std::exp(negs[s] - m);
  return m + std::log(acc);
}

}  // namespace

std::vector<RankingPairTerm> ranking_pair_terms(const RankedBatch& batch,
                                                double lambda) {
  check_batch(batch);
  const auto order = quality_order(batch.qualities);
  std::vector<RankingPairTerm> terms;
  terms.reserve(order.size() * (order.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto hi = static_cast<Eigen::Index>(order[i]);
      const auto lo = static_cast<Eigen::Index>(order[j]);
      RankingPairTerm term;
      term.higher = order[i];
      term.lower = order[j];
      term.margin = lambda * (batch.qualities[hi] - batch.qualities[lo]);
      term.hinge_arg = batch.scores[lo] - batch.scores[hi] + term.margin;
      term.active = term.hinge_arg > 0.0;
      terms.push_back(term);
    }
  }
  return terms;
}

double ranking_loss(const RankedBatch& batch, double lambda) {
  double loss = 0.0;
  for (const auto& term : ranking_pair_terms(batch, lambda)) {
    if (term.active) loss += term.hinge_arg;
  }
  return loss;
}

Eigen::VectorXd ranking_loss_grad(const RankedBatch& batch, double lambda) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(batch.scores.size());
  for (const auto& term : ranking_pair_terms(batch, lambda)) {
    if (!term.active) continue;
    grad[static_cast<Eigen::Index>(term.lower)] += 1.0;
    grad[static_cast<Eigen::Index>(term.higher)] -= 1.0;
  }
  return grad;
}

std::vector<int> instance_weights(const std::vector<std::string>& candidates,
                                  const std::string& reference, double phi,
                                  const Embedder& embedder) {
  std::vector<int> alphas;
  alphas.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    alphas.push_back(semantic_similarity(candidate, reference, embedder) >= phi
                         ? 1
                         : 0);
  }
  return alphas;
}

double contrastive_loss(const Eigen::VectorXd& pos_scores,
                        const Eigen::VectorXd& neg_scores,
                        const std::vector<int>& alphas) {
  if (static_cast<std::size_t>(pos_scores.size()) != alphas.size()) {
    throw std::invalid_argument("contrastive_loss: alphas and positives differ in length");
  }
  if (pos_scores.size() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < pos_scores.size(); ++i) {
    if (alphas[static_cast<std::size_t>(i)] == 0) continue;
    total += log_denominator(pos_scores[i], neg_scores) - pos_scores[i];
  }
  return total / static_cast<double>(pos_scores.size());
}

ContrastiveGrad contrastive_loss_grad(const Eigen::VectorXd& pos_scores,
                                      const Eigen::VectorXd& neg_scores,
                                      const std::vector<int>& alphas) {
  if (static_cast<std::size_t>(pos_scores.size()) != alphas.size()) {
    throw std::invalid_argument("contrastive_loss: alphas and positives differ in length");
  }
  ContrastiveGrad grad;
  grad.d_pos = Eigen::VectorXd::Zero(pos_scores.size());
  grad.d_neg = Eigen::VectorXd::Zero(neg_scores.size());
  if (pos_scores.size() == 0) return grad;

  const double scale = 1.0 / static_cast<double>(pos_scores.size());
  for (Eigen::Index i = 0; i < pos_scores.size(); ++i) {
    if (alphas[static_cast<std::size_t>(i)] == 0) continue;
    const double log_denom = log_denominator(pos_scores[i], neg_scores);
    const double p_self = std::exp(pos_scores[i] - log_denom);
    grad.d_pos[i] += scale * (p_self - 1.0);
    for (Eigen::Index s = 0; s < neg_scores.size(); ++s) {
      grad.d_neg[s] += scale * std::exp(neg_scores[s] - log_denom);
    }
  }
  return grad;
}

}  // namespace rerank
