#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rerank/config.hpp"
#include "rerank/pool.hpp"
#include "rerank/rouge.hpp"
#include "rerank/tokenize.hpp"

namespace rerank {

// Maps text into the vector space the similarity layer scores in.
// encode_document yields one column per sentence.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual Eigen::MatrixXd encode_document(const Document& doc) const = 0;
  virtual Eigen::VectorXd encode_summary(const std::string& text) const = 0;
};

// Trainable backend small enough to optimize on CPU: a hashed token-embedding
// table, mean-pooled per sentence or summary. Gradients are accumulated
// manually via accumulate_grad.
class TinyEmbeddingBackend final : public EncoderBackend {
 public:
  TinyEmbeddingBackend(int dim, int vocab, TokenizerConfig tok = {},
                       bool normalize = false);

  std::string name() const override { return "tiny"; }
  int dim() const override { return dim_; }
  int vocab() const { return vocab_; }
  bool normalize() const { return normalize_; }
  const TokenizerConfig& tokenizer() const { return tok_; }

  // Gaussian init, deterministic in the seed.
  void init_parameters(std::uint64_t seed, double scale = 0.1);

  // dim x vocab table; one column per hashed vocabulary slot.
  const Eigen::MatrixXd& embedding() const { return embedding_; }
  Eigen::MatrixXd& embedding() { return embedding_; }
  void set_embedding(Eigen::MatrixXd table);

  int slot(std::string_view token) const;

  Eigen::VectorXd encode_tokens(const TokenSequence& tokens) const;
  Eigen::MatrixXd encode_document(const Document& doc) const override;
  Eigen::VectorXd encode_summary(const std::string& text) const override;

  // Adds d(loss)/d(embedding) for one encoded token sequence into `grad`,
  // given the loss gradient with respect to the encoded vector.
  void accumulate_grad(const TokenSequence& tokens,
                       const Eigen::VectorXd& d_encoded,
                       Eigen::MatrixXd& grad) const;

 private:
  int dim_;
  int vocab_;
  TokenizerConfig tok_;
  bool normalize_;
  Eigen::MatrixXd embedding_;
};

// One validation pass during training: mean quality of the selected (top-1)
// candidate under both metrics.
struct ValidationPoint {
  long long step = 0;
  double selected_lexical = 0.0;
  double selected_semantic = 0.0;
};

// Serializable model state. Reload is bit-exact: doubles survive the JSON
// round trip unchanged.
struct Checkpoint {
  std::string backend = "tiny";
  TrainConfig config;
  Eigen::MatrixXd embedding;
  long long step = 0;
  std::vector<ValidationPoint> history;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

TinyEmbeddingBackend backend_from_checkpoint(const Checkpoint& cp);

// Assigns one score per candidate; higher means preferred.
class CandidateScorer {
 public:
  virtual ~CandidateScorer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> score(const CandidatePool& pool) const = 0;
};

// Self-weighted similarity under a trained backend. The document is encoded
// once per pool, then shared across its candidates.
class ModelScorer final : public CandidateScorer {
 public:
  explicit ModelScorer(TinyEmbeddingBackend backend) : backend_(std::move(backend)) {}
  std::string name() const override { return "model"; }
  std::vector<double> score(const CandidatePool& pool) const override;
  const TinyEmbeddingBackend& backend() const { return backend_; }

 private:
  TinyEmbeddingBackend backend_;
};

// Scores each candidate by its quality against the reference; the ceiling a
// learned scorer is compared to.
class OracleLexicalScorer final : public CandidateScorer {
 public:
  explicit OracleLexicalScorer(const std::string& metric = "rouge_avg",
                               TokenizerConfig tok = {})
      : metric_(quality_metric(metric)), tok_(tok) {}
  std::string name() const override { return "oracle"; }
  std::vector<double> score(const CandidatePool& pool) const override;

 private:
  QualityMetric metric_;
  TokenizerConfig tok_;
};

// Uniform noise, seeded per pool id; the floor for the same comparison.
class RandomScorer final : public CandidateScorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  std::vector<double> score(const CandidatePool& pool) const override;

 private:
  std::uint64_t seed_;
};

std::unique_ptr<CandidateScorer> make_scorer(const Checkpoint& cp);

}  // namespace rerank
