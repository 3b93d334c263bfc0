#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "rerank/embedder.hpp"

namespace rerank {

struct LossConfig {
  double lambda = 1.0;   // margin scale (1.0 CNN/DM-style, 0.1 the documented alternative)
  double phi = 0.9;      // instance-weighting threshold
  bool weighting = true; // false: every candidate keeps weight 1
  double gamma1 = 10.0;  // ranking-loss scale
  double gamma2 = 0.1;   // contrastive-loss scale
  int negatives = 4;     // negatives sampled per document
};

// Candidate scores f and qualities M for one pool, index-aligned.
struct RankedBatch {
  Eigen::VectorXd scores;
  Eigen::VectorXd qualities;
};

// One hinge term of the ranking loss, exposed for inspection: the pair in
// quality order, its required margin lambda*(M_hi - M_lo), and the hinge
// argument f_lo - f_hi + margin.
struct RankingPairTerm {
  std::size_t higher;  // original index of the higher-quality candidate
  std::size_t lower;
  double margin;
  double hinge_arg;
  bool active;  // hinge_arg > 0
};

// Pairs are enumerated over the quality-descending order (stable: equal
// qualities keep input order), so equal-quality pairs carry a margin of
// exactly zero.
std::vector<RankingPairTerm> ranking_pair_terms(const RankedBatch& batch,
                                                double lambda);

// Sum of max(0, hinge_arg) over all quality-ordered pairs.
double ranking_loss(const RankedBatch& batch, double lambda);

// d ranking_loss / d scores; the hinge subgradient at zero is taken as zero.
Eigen::VectorXd ranking_loss_grad(const RankedBatch& batch, double lambda);

// Binary weights: 1 iff the embedder similarity to the reference reaches phi.
std::vector<int> instance_weights(const std::vector<std::string>& candidates,
                                  const std::string& reference, double phi,
                                  const Embedder& embedder);

// Instance-weighted contrastive loss. Each surviving positive contributes
// -log(e^{f_i} / (e^{f_i} + sum_s e^{g_s})); zero-weighted positives
// contribute exactly nothing, but still count toward the 1/|C| average.
double contrastive_loss(const Eigen::VectorXd& pos_scores,
                        const Eigen::VectorXd& neg_scores,
                        const std::vector<int>& alphas);

struct ContrastiveGrad {
  Eigen::VectorXd d_pos;
  Eigen::VectorXd d_neg;
};

ContrastiveGrad contrastive_loss_grad(const Eigen::VectorXd& pos_scores,
                                      const Eigen::VectorXd& neg_scores,
                                      const std::vector<int>& alphas);

inline double combined_loss(double rank_value, double ctr_value, double gamma1,
                            double gamma2) {
  return gamma1 * rank_value + gamma2 * ctr_value;
}

}  // namespace rerank
