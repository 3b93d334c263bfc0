#include "rerank/training.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rerank/error.hpp"
#include "rerank/evaluation.hpp"
#include "rerank/losses.hpp"
#include "rerank/optimizer.hpp"
#include "rerank/rng.hpp"
#include "rerank/similarity.hpp"

namespace rerank {

namespace {

constexpr std::uint64_t kOrderTag = 0x6f726472;  // epoch shuffles
constexpr std::uint64_t kNegTag = 0x6e656773;    // per-(epoch, pool) negatives
constexpr std::uint64_t kEvalTag = 0x6576616c;   // corpus_loss negatives

// Tokenized pool contents plus the training constants (qualities, instance
// weights) that never change across epochs.
struct PoolData {
  std::vector<TokenSequence> sentence_tokens;
  std::vector<TokenSequence> candidate_tokens;
  Eigen::VectorXd qualities;
  std::vector<int> alphas;
};

PoolData prepare_pool(const CandidatePool& pool, const TrainConfig& config,
                      const QualityMetric& metric, const HashedBowEmbedder& embedder) {
  PoolData data;
  const std::vector<std::string> fallback =
      pool.document.sentences.empty() ? segment_sentences(pool.document.text)
                                      : std::vector<std::string>{};
  const std::vector<std::string>& sentences =
      pool.document.sentences.empty() ? fallback : pool.document.sentences;
  data.sentence_tokens.reserve(sentences.size());
  for (const std::string& s : sentences) {
    data.sentence_tokens.push_back(tokenize(s, config.tokenizer));
  }
  data.candidate_tokens.reserve(pool.candidates.size());
  for (const std::string& c : pool.candidates) {
    data.candidate_tokens.push_back(tokenize(c, config.tokenizer));
  }

  const std::vector<double> qualities = pool_qualities(pool, metric, config.tokenizer);
  data.qualities = Eigen::Map<const Eigen::VectorXd>(
      qualities.data(), static_cast<Eigen::Index>(qualities.size()));

  if (config.loss.weighting) {
    data.alphas = instance_weights(pool.candidates, pool.reference,
                                   config.loss.phi, embedder);
  } else {
    data.alphas.assign(pool.candidates.size(), 1);
  }
  return data;
}

struct PoolLoss {
  double rank = 0.0;
  double ctr = 0.0;
  double combined = 0.0;
};

// Loss for one pool; when `grad` is given, also the gradient of the combined
// loss with respect to the embedding table, accumulated in place.
PoolLoss pool_loss(const TinyEmbeddingBackend& backend, const PoolData& data,
                   const std::vector<TokenSequence>& negative_tokens,
                   const LossConfig& loss, Eigen::MatrixXd* grad) {
  Eigen::MatrixXd doc(backend.dim(),
                      static_cast<Eigen::Index>(data.sentence_tokens.size()));
  for (std::size_t k = 0; k < data.sentence_tokens.size(); ++k) {
    doc.col(static_cast<Eigen::Index>(k)) =
        backend.encode_tokens(data.sentence_tokens[k]);
  }

  const std::size_t m = data.candidate_tokens.size();
  std::vector<Eigen::VectorXd> cand(m);
  Eigen::VectorXd f(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    cand[i] = backend.encode_tokens(data.candidate_tokens[i]);
    f[static_cast<Eigen::Index>(i)] = similarity(cand[i], doc).total;
  }
  const std::size_t n = negative_tokens.size();
  std::vector<Eigen::VectorXd> negs(n);
  Eigen::VectorXd g(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    negs[s] = backend.encode_tokens(negative_tokens[s]);
    g[static_cast<Eigen::Index>(s)] = similarity(negs[s], doc).total;
  }

  PoolLoss out;
  const RankedBatch batch{f, data.qualities};
  out.rank = ranking_loss(batch, loss.lambda);
  out.ctr = contrastive_loss(f, g, data.alphas);
  out.combined = combined_loss(out.rank, out.ctr, loss.gamma1, loss.gamma2);
  if (!grad) return out;

  const Eigen::VectorXd d_rank = ranking_loss_grad(batch, loss.lambda);
  const ContrastiveGrad d_ctr = contrastive_loss_grad(f, g, data.alphas);
  const Eigen::VectorXd df = loss.gamma1 * d_rank + loss.gamma2 * d_ctr.d_pos;
  const Eigen::VectorXd dg = loss.gamma2 * d_ctr.d_neg;

  Eigen::MatrixXd d_doc = Eigen::MatrixXd::Zero(doc.rows(), doc.cols());
  for (std::size_t i = 0; i < m; ++i) {
    const double up = df[static_cast<Eigen::Index>(i)];
    if (up == 0.0) continue;
    const SimilarityGrad sg = similarity_backward(cand[i], doc, up);
    backend.accumulate_grad(data.candidate_tokens[i], sg.d_summary, *grad);
    d_doc += sg.d_doc;
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double up = dg[static_cast<Eigen::Index>(s)];
    if (up == 0.0) continue;
    const SimilarityGrad sg = similarity_backward(negs[s], doc, up);
    backend.accumulate_grad(negative_tokens[s], sg.d_summary, *grad);
    d_doc += sg.d_doc;
  }
  for (std::size_t k = 0; k < data.sentence_tokens.size(); ++k) {
    backend.accumulate_grad(data.sentence_tokens[k],
                            d_doc.col(static_cast<Eigen::Index>(k)), *grad);
  }
  return out;
}

std::vector<TokenSequence> tokenize_negatives(const Corpus& corpus,
                                              const std::string& anchor_id,
                                              const LossConfig& loss,
                                              std::uint64_t seed,
                                              const TokenizerConfig& tok) {
  const NegativeSet set = sample_negatives(corpus, anchor_id, loss.negatives, seed);
  std::vector<TokenSequence> out;
  out.reserve(set.summaries.size());
  for (const std::string& s : set.summaries) out.push_back(tokenize(s, tok));
  return out;
}

double corpus_loss_prepared(const TinyEmbeddingBackend& backend, const Corpus& corpus,
                            const std::vector<PoolData>& data,
                            const TrainConfig& config) {
  double total = 0.0;
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const auto negs = tokenize_negatives(corpus, corpus[p].document.id, config.loss,
                                         mix_seed({config.seed, kEvalTag,
                                                   static_cast<std::uint64_t>(p)}),
                                         config.tokenizer);
    total += pool_loss(backend, data[p], negs, config.loss, nullptr).combined;
  }
  return total / static_cast<double>(corpus.size());
}

void check_config(const TrainConfig& config) {
  if (config.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (config.learning_rate <= 0) throw std::invalid_argument("train: learning_rate must be > 0");
  if (config.validate_every < 1) throw std::invalid_argument("train: validate_every must be >= 1");
  if (config.dim < 1 || config.vocab < 1) throw std::invalid_argument("train: dim and vocab must be >= 1");
  if (config.init_scale <= 0) throw std::invalid_argument("train: init_scale must be > 0");
  if (config.loss.negatives < 0) throw std::invalid_argument("train: negatives must be >= 0");
}

}  // namespace

ValidationPoint validate(const CandidateScorer& scorer, const Corpus& pools,
                         const std::string& metric, const TokenizerConfig& tok,
                         long long step) {
  if (pools.empty()) throw std::invalid_argument("validate: empty validation set");
  const QualityMetric m = quality_metric(metric);
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, tok);
  ValidationPoint point;
  point.step = step;
  for (const CandidatePool& pool : pools) {
    const std::size_t best = select_best(scorer.score(pool));
    point.selected_lexical += pool_qualities(pool, m, tok)[best];
    point.selected_semantic += pool_semantics(pool, embedder, tok)[best];
  }
  point.selected_lexical /= static_cast<double>(pools.size());
  point.selected_semantic /= static_cast<double>(pools.size());
  return point;
}

ValidationPoint validate(const Checkpoint& cp, const Corpus& pools) {
  const ModelScorer scorer(backend_from_checkpoint(cp));
  return validate(scorer, pools, cp.config.metric, cp.config.tokenizer, cp.step);
}

double corpus_loss(const TinyEmbeddingBackend& backend, const Corpus& corpus,
                   const TrainConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("corpus_loss: empty corpus");
  const QualityMetric metric = quality_metric(config.metric);
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, config.tokenizer);
  std::vector<PoolData> data;
  data.reserve(corpus.size());
  for (const CandidatePool& pool : corpus) {
    data.push_back(prepare_pool(pool, config, metric, embedder));
  }
  return corpus_loss_prepared(backend, corpus, data, config);
}

TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const Corpus& validation) {
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  check_config(config);

  const QualityMetric metric = quality_metric(config.metric);
  const HashedBowEmbedder embedder(HashedBowEmbedder::kDefaultDim, config.tokenizer);
  std::vector<PoolData> data;
  data.reserve(corpus.size());
  for (const CandidatePool& pool : corpus) {
    data.push_back(prepare_pool(pool, config, metric, embedder));
  }

  TinyEmbeddingBackend backend(config.dim, config.vocab, config.tokenizer,
                               config.normalize_encodings);
  backend.init_parameters(config.seed, config.init_scale);
  const auto optimizer = make_optimizer(config.optimizer, config.learning_rate);

  TrainResult result;
  result.initial_loss = corpus_loss_prepared(backend, corpus, data, config);

  long long step = 0;
  const auto snapshot = [&]() {
    Checkpoint cp;
    cp.config = config;
    cp.embedding = backend.embedding();
    cp.step = step;
    cp.history = result.history;
    return cp;
  };

  Checkpoint best;
  bool have_best = false;
  double best_metric = -std::numeric_limits<double>::infinity();
  const auto run_validation = [&]() {
    if (validation.empty()) return;
    if (!result.history.empty() && result.history.back().step == step) return;
    const ModelScorer scorer(backend);
    const ValidationPoint point =
        validate(scorer, validation, config.metric, config.tokenizer, step);
    result.history.push_back(point);
    const double sel = config.selection_metric == "lexical" ? point.selected_lexical
                                                            : point.selected_semantic;
    if (!have_best || sel > best_metric) {
      best_metric = sel;
      best = snapshot();
      have_best = true;
    }
    if (!result.log.empty() && result.log.back().step == step) {
      result.log.back().val_metric = sel;
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    Rng(mix_seed({config.seed, kOrderTag, static_cast<std::uint64_t>(epoch)}))
        .shuffle(order);

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(config.dim, config.vocab);
      double rank_sum = 0.0;
      double ctr_sum = 0.0;
      double combined_sum = 0.0;
      std::string batch_desc;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t p = order[b];
        const auto negs =
            tokenize_negatives(corpus, corpus[p].document.id, config.loss,
                               mix_seed({config.seed, kNegTag,
                                         static_cast<std::uint64_t>(epoch),
                                         static_cast<std::uint64_t>(p)}),
                               config.tokenizer);
        const PoolLoss pl = pool_loss(backend, data[p], negs, config.loss, &grad);
        rank_sum += pl.rank;
        ctr_sum += pl.ctr;
        combined_sum += pl.combined;
        if (!batch_desc.empty()) batch_desc += ", ";
        batch_desc += corpus[p].document.id + " (rank=" + std::to_string(pl.rank) +
                      ", ctr=" + std::to_string(pl.ctr) + ")";
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      grad *= inv;
      TrainLogEntry entry;
      entry.rank_loss = rank_sum * inv;
      entry.ctr_loss = ctr_sum * inv;
      entry.combined = combined_sum * inv;
      if (!std::isfinite(entry.combined) || !grad.allFinite()) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(step + 1) + "; batch: " + batch_desc);
      }
      optimizer->step(backend.embedding(), grad);
      ++step;
      entry.step = step;
      result.log.push_back(entry);
      if (step % config.validate_every == 0) run_validation();
    }
  }
  run_validation();  // no-op when the last step already validated, or no validation set

  result.final_loss = config.epochs > 0
                          ? corpus_loss_prepared(backend, corpus, data, config)
                          : result.initial_loss;
  result.last = snapshot();
  result.best = have_best ? best : result.last;
  result.last.history = result.history;
  return result;
}

}  // namespace rerank
