#pragma once

#include <Eigen/Core>
#include <string_view>

#include "rerank/rouge.hpp"
#include "rerank/tokenize.hpp"

namespace rerank {

// Text -> unit-norm vector. Implementations must be deterministic.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd embed(std::string_view text) const = 0;
};

// Dependency-free reference embedder: hashed bag of tokens, L2-normalized.
// Component values are non-negative, so cosines land in [0, 1].
class HashedBowEmbedder final : public Embedder {
 public:
  static constexpr int kDefaultDim = 256;

  explicit HashedBowEmbedder(int dim = kDefaultDim, TokenizerConfig tok = {})
      : dim_(dim), tok_(tok) {}

  int dim() const override { return dim_; }
  Eigen::VectorXd embed(std::string_view text) const override;

  // Bucket index of a single token.
  int bucket(std::string_view token) const;

 private:
  int dim_;
  TokenizerConfig tok_;
};

// Inner product of the two embeddings. Throws NumericError when either
// embedding is (near) zero, which signals a degenerate embedder or empty text.
double semantic_similarity(std::string_view a, std::string_view b,
                           const Embedder& embedder);

// BERTScore-style greedy token matching: precision is the mean over candidate
// tokens of the best cosine against any reference token, recall symmetric.
// Empty inputs yield an all-zero score.
MetricScore greedy_semantic_f1(const TokenSequence& candidate,
                               const TokenSequence& reference,
                               const Embedder& token_embedder);

}  // namespace rerank
