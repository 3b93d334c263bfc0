// Acceptance gate. Each criterion prints exactly one stdout line,
// "<tag>: pass" or "<tag>: fail"; numeric context goes to stderr so the
// stdout contract stays one line per criterion. Exit code is the number of
// failed criteria.

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rerank/embedder.hpp"
#include "rerank/encoder.hpp"
#include "rerank/evaluation.hpp"
#include "rerank/losses.hpp"
#include "rerank/pool.hpp"
#include "rerank/rng.hpp"
#include "rerank/rouge.hpp"
#include "rerank/similarity.hpp"
#include "rerank/synthetic.hpp"
#include "rerank/tokenize.hpp"
#include "rerank/training.hpp"

#include "../../tools/cli.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

namespace {

using rerank::Rng;

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// One finite-difference agreement check; tracks the worst error seen.
bool grad_agrees(const std::function<double(const Eigen::VectorXd&)>& f,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& analytic,
                 double* worst) {
  const Eigen::VectorXd fd = rerank::oracle::central_difference(f, x, 1e-5);
  const double err = rerank::oracle::max_relative_error(analytic, fd);
  *worst = std::max(*worst, err);
  return err < 1e-4;
}

// Command-line entry point with swallowed output, for the criteria that
// exercise the artifact end to end.
int run_quiet(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"rerank"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  std::ostringstream captured_out;
  std::ostringstream captured_err;
  std::streambuf* out_buf = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* err_buf = std::cerr.rdbuf(captured_err.rdbuf());
  const int code = rerank::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(out_buf);
  std::cerr.rdbuf(err_buf);
  return code;
}

// A1: rouge_n (n = 1, 2) and rouge_l agree with the brute-force multiset /
// DP oracles on 1,000 random token sequences of length <= 30, to 1e-9.
bool a1_metric_oracles() {
  Rng rng(101);
  int bad = 0;
  for (int it = 0; it < 1000; ++it) {
    const auto cand = rerank::oracle::random_tokens(rng, 30);
    const auto ref = rerank::oracle::random_tokens(rng, 30);
    const struct {
      rerank::MetricScore got;
      rerank::oracle::Prf want;
    } checks[] = {
        {rerank::rouge_n(cand, ref, 1), rerank::oracle::ngram_f1(cand, ref, 1)},
        {rerank::rouge_n(cand, ref, 2), rerank::oracle::ngram_f1(cand, ref, 2)},
        {rerank::rouge_l(cand, ref), rerank::oracle::lcs_f1(cand, ref)},
    };
    for (const auto& c : checks) {
      if (!close(c.got.precision, c.want.precision, 1e-9) ||
          !close(c.got.recall, c.want.recall, 1e-9) ||
          !close(c.got.f1, c.want.f1, 1e-9)) {
        ++bad;
      }
    }
  }
  if (bad > 0) std::cerr << "  a1: " << bad << " metric disagreements\n";
  return bad == 0;
}

// A2: analytic gradients of the ranking loss, contrastive loss, combined
// loss, and the self-weighted similarity match central differences
// (h = 1e-5, relative error < 1e-4) at 100 random non-kink points each.
bool a2_gradient_checks() {
  Rng rng(202);
  double worst = 0.0;
  int bad = 0;

  // Ranking loss with respect to candidate scores, away from hinge kinks.
  for (int accepted = 0, attempts = 0; accepted < 100 && attempts < 100000; ++attempts) {
    const int m = 2 + static_cast<int>(rng.below(5));
    Eigen::VectorXd scores(m);
    Eigen::VectorXd qualities(m);
    for (int i = 0; i < m; ++i) scores[i] = rng.normal();
    for (int i = 0; i < m; ++i) qualities[i] = rng.uniform01();
    const double lambda = 0.1 + 1.9 * rng.uniform01();
    const rerank::RankedBatch batch{scores, qualities};
    bool kink = false;
    for (const auto& term : rerank::ranking_pair_terms(batch, lambda)) {
      if (std::abs(term.hinge_arg) < 1e-3) kink = true;
    }
    if (kink) continue;
    ++accepted;
    const auto f = [&](const Eigen::VectorXd& x) {
      return rerank::ranking_loss({x, qualities}, lambda);
    };
    if (!grad_agrees(f, scores, rerank::ranking_loss_grad(batch, lambda), &worst)) ++bad;
  }

  // Contrastive loss with respect to positive and negative scores jointly.
  for (int accepted = 0, attempts = 0; accepted < 100 && attempts < 100000; ++attempts) {
    const int m = 2 + static_cast<int>(rng.below(4));
    const int n = 1 + static_cast<int>(rng.below(4));
    Eigen::VectorXd pos(m);
    Eigen::VectorXd neg(n);
    for (int i = 0; i < m; ++i) pos[i] = rng.normal();
    for (int i = 0; i < n; ++i) neg[i] = rng.normal();
    std::vector<int> alphas(m);
    int ones = 0;
    for (int i = 0; i < m; ++i) {
      alphas[i] = rng.below(2) ? 1 : 0;
      ones += alphas[i];
    }
    if (ones == 0) continue;
    ++accepted;
    Eigen::VectorXd z(m + n);
    z << pos, neg;
    const auto f = [&](const Eigen::VectorXd& zz) {
      return rerank::contrastive_loss(zz.head(m), zz.tail(n), alphas);
    };
    const auto grad = rerank::contrastive_loss_grad(pos, neg, alphas);
    Eigen::VectorXd analytic(m + n);
    analytic << grad.d_pos, grad.d_neg;
    if (!grad_agrees(f, z, analytic, &worst)) ++bad;
  }

  // Combined loss with respect to every score feeding it.
  for (int accepted = 0, attempts = 0; accepted < 100 && attempts < 100000; ++attempts) {
    const int m = 2 + static_cast<int>(rng.below(4));
    const int n = 1 + static_cast<int>(rng.below(3));
    Eigen::VectorXd scores(m);
    Eigen::VectorXd qualities(m);
    Eigen::VectorXd neg(n);
    for (int i = 0; i < m; ++i) scores[i] = rng.normal();
    for (int i = 0; i < m; ++i) qualities[i] = rng.uniform01();
    for (int i = 0; i < n; ++i) neg[i] = rng.normal();
    std::vector<int> alphas(m);
    int ones = 0;
    for (int i = 0; i < m; ++i) {
      alphas[i] = rng.below(2) ? 1 : 0;
      ones += alphas[i];
    }
    if (ones == 0) continue;
    const double lambda = 1.0;
    const double gamma1 = 10.0;
    const double gamma2 = 0.1;
    bool kink = false;
    for (const auto& term : rerank::ranking_pair_terms({scores, qualities}, lambda)) {
      if (std::abs(term.hinge_arg) < 1e-3) kink = true;
    }
    if (kink) continue;
    ++accepted;
    Eigen::VectorXd z(m + n);
    z << scores, neg;
    const auto f = [&](const Eigen::VectorXd& zz) {
      const Eigen::VectorXd p = zz.head(m);
      const Eigen::VectorXd g = zz.tail(n);
      return rerank::combined_loss(rerank::ranking_loss({p, qualities}, lambda),
                                   rerank::contrastive_loss(p, g, alphas), gamma1,
                                   gamma2);
    };
    const auto ctr = rerank::contrastive_loss_grad(scores, neg, alphas);
    Eigen::VectorXd analytic(m + n);
    analytic.head(m) =
        gamma1 * rerank::ranking_loss_grad({scores, qualities}, lambda) + gamma2 * ctr.d_pos;
    analytic.tail(n) = gamma2 * ctr.d_neg;
    if (!grad_agrees(f, z, analytic, &worst)) ++bad;
  }

  // Similarity with respect to raw scores, and jointly with respect to the
  // summary vector and every document sentence vector. Points near the
  // uniform-weight guard are rejected.
  for (int accepted = 0, attempts = 0; accepted < 100 && attempts < 100000; ++attempts) {
    const int d = 2 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(4));
    Eigen::VectorXd summary(d);
    Eigen::MatrixXd doc(d, k);
    for (int i = 0; i < d; ++i) summary[i] = rng.normal();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < k; ++j) doc(i, j) = rng.normal();
    }
    const Eigen::VectorXd scores = rerank::sentence_scores(summary, doc);
    if (std::abs(scores.sum()) < 0.1) continue;
    ++accepted;

    const auto from_scores = [](const Eigen::VectorXd& s) {
      return rerank::similarity_from_scores(s).total;
    };
    if (!grad_agrees(from_scores, scores, rerank::similarity_grad_scores(scores), &worst)) {
      ++bad;
    }

    Eigen::VectorXd z(d + d * k);
    z.head(d) = summary;
    Eigen::Map<Eigen::MatrixXd>(z.data() + d, d, k) = doc;
    const auto f = [&](const Eigen::VectorXd& zz) {
      const Eigen::VectorXd u = zz.head(d);
      const Eigen::MatrixXd m2 = Eigen::Map<const Eigen::MatrixXd>(zz.data() + d, d, k);
      return rerank::similarity(u, m2).total;
    };
    const auto grad = rerank::similarity_backward(summary, doc);
    Eigen::VectorXd analytic(d + d * k);
    analytic.head(d) = grad.d_summary;
    Eigen::Map<Eigen::MatrixXd>(analytic.data() + d, d, k) = grad.d_doc;
    if (!grad_agrees(f, z, analytic, &worst)) ++bad;
  }

  std::cerr << "  a2: worst relative error " << worst << "\n";
  return bad == 0;
}

// A3: equal-quality pairs carry margin exactly zero; the ranking loss is
// shift-invariant; zero-weighted candidates contribute exactly nothing to the
// contrastive loss or its gradient; instance weights are monotone in phi with
// an inclusive threshold.
bool a3_loss_semantics() {
  Rng rng(303);
  int bad = 0;

  for (int it = 0; it < 100; ++it) {
    const int m = 2 + static_cast<int>(rng.below(5));
    Eigen::VectorXd scores(m);
    Eigen::VectorXd qualities(m);
    for (int i = 0; i < m; ++i) scores[i] = rng.normal();
    const double shared = rng.uniform01();
    for (int i = 0; i < m; ++i) {
      qualities[i] = rng.below(2) ? shared : rng.uniform01();
    }
    for (const auto& term : rerank::ranking_pair_terms({scores, qualities}, 1.7)) {
      if (qualities[static_cast<Eigen::Index>(term.higher)] ==
              qualities[static_cast<Eigen::Index>(term.lower)] &&
          term.margin != 0.0) {
        ++bad;
      }
    }
  }
  {
    Eigen::VectorXd scores(4);
    scores << 0.3, -1.2, 0.8, 0.1;
    const Eigen::VectorXd qualities = Eigen::VectorXd::Constant(4, 0.7);
    for (const auto& term : rerank::ranking_pair_terms({scores, qualities}, 2.5)) {
      if (term.margin != 0.0) ++bad;
    }
  }

  for (int it = 0; it < 100; ++it) {
    const int m = 2 + static_cast<int>(rng.below(5));
    Eigen::VectorXd scores(m);
    Eigen::VectorXd qualities(m);
    for (int i = 0; i < m; ++i) scores[i] = rng.normal();
    for (int i = 0; i < m; ++i) qualities[i] = rng.uniform01();
    const double lambda = 2.0 * rng.uniform01();
    const double shift = 20.0 * (rng.uniform01() - 0.5);
    const Eigen::VectorXd shifted = scores.array() + shift;
    if (!close(rerank::ranking_loss({scores, qualities}, lambda),
               rerank::ranking_loss({shifted, qualities}, lambda), 1e-9)) {
      ++bad;
    }
  }

  for (int it = 0; it < 100; ++it) {
    const int m = 2 + static_cast<int>(rng.below(4));
    const int n = 1 + static_cast<int>(rng.below(4));
    Eigen::VectorXd pos(m);
    Eigen::VectorXd neg(n);
    for (int i = 0; i < m; ++i) pos[i] = rng.normal();
    for (int i = 0; i < n; ++i) neg[i] = rng.normal();
    std::vector<int> alphas(m);
    for (int i = 0; i < m; ++i) alphas[i] = rng.below(2) ? 1 : 0;
    alphas[static_cast<std::size_t>(rng.below(m))] = 0;

    // Dropped candidates must not influence the value at all, so rewriting
    // their scores is a bitwise no-op.
    Eigen::VectorXd altered = pos;
    for (int i = 0; i < m; ++i) {
      if (alphas[i] == 0) altered[i] = 10.0 * rng.normal();
    }
    if (rerank::contrastive_loss(pos, neg, alphas) !=
        rerank::contrastive_loss(altered, neg, alphas)) {
      ++bad;
    }
    const auto grad = rerank::contrastive_loss_grad(pos, neg, alphas);
    for (int i = 0; i < m; ++i) {
      if (alphas[i] == 0 && grad.d_pos[i] != 0.0) ++bad;
    }
  }
  {
    Eigen::VectorXd pos(3);
    Eigen::VectorXd neg(2);
    pos << 0.4, -0.2, 1.1;
    neg << 0.0, 0.3;
    const std::vector<int> zeros{0, 0, 0};
    if (rerank::contrastive_loss(pos, neg, zeros) != 0.0) ++bad;
    const auto grad = rerank::contrastive_loss_grad(pos, neg, zeros);
    if (grad.d_pos.cwiseAbs().maxCoeff() != 0.0 || grad.d_neg.cwiseAbs().maxCoeff() != 0.0) {
      ++bad;
    }
  }

  const rerank::TokenizerConfig tok;
  const rerank::HashedBowEmbedder emb(rerank::HashedBowEmbedder::kDefaultDim, tok);
  const auto sentence = [&rng]() {
    std::string s;
    const int len = 3 + static_cast<int>(rng.below(6));
    for (int i = 0; i < len; ++i) {
      if (i > 0) s += ' ';
      s += "w" + std::to_string(rng.below(15));
    }
    return s;
  };
  for (int it = 0; it < 50; ++it) {
    const std::string reference = sentence();
    std::vector<std::string> candidates;
    for (int c = 0; c < 4; ++c) candidates.push_back(sentence());
    candidates.push_back(reference);
    std::vector<int> prev;
    for (const double phi : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const auto weights = rerank::instance_weights(candidates, reference, phi, emb);
      if (phi == 0.0) {
        for (const int w : weights) {
          if (w != 1) ++bad;  // bag-of-token cosines are non-negative
        }
      }
      if (!prev.empty()) {
        for (std::size_t i = 0; i < weights.size(); ++i) {
          if (weights[i] > prev[i]) ++bad;
        }
      }
      prev = weights;
    }
    // Threshold is inclusive: the weight flips only strictly above the
    // candidate's similarity.
    const double sim = rerank::semantic_similarity(candidates[0], reference, emb);
    if (rerank::instance_weights(candidates, reference, sim, emb)[0] != 1) ++bad;
    if (rerank::instance_weights(candidates, reference, std::nextafter(sim, 2.0), emb)[0] != 0) {
      ++bad;
    }
  }

  if (bad > 0) std::cerr << "  a3: " << bad << " semantic violations\n";
  return bad == 0;
}

// A4: on a 100x8 synthetic corpus with default hyperparameters, five epochs
// cut the combined training loss to <= 50% of its initial value and lift the
// selected top-1 lexical quality by >= 0.05 over the untrained checkpoint,
// both averaged over seeds 1-3.
bool a4_desk_scale_training() {
  double ratio_sum = 0.0;
  double gap_sum = 0.0;
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    rerank::SyntheticConfig synth;
    synth.seed = seed;
    const auto corpus = rerank::generate_synthetic_corpus(synth);

    rerank::TrainConfig config;
    config.seed = seed;
    const auto trained = rerank::train(corpus.pools, config);

    rerank::TrainConfig frozen = config;
    frozen.epochs = 0;
    const auto untrained = rerank::train(corpus.pools, frozen);

    const double ratio = trained.final_loss / trained.initial_loss;
    const double gap = rerank::validate(trained.last, corpus.pools).selected_lexical -
                       rerank::validate(untrained.last, corpus.pools).selected_lexical;
    std::cerr << "  a4 seed " << seed << ": loss ratio " << ratio << ", top-1 gap " << gap
              << "\n";
    ratio_sum += ratio;
    gap_sum += gap;
  }
  const double mean_ratio = ratio_sum / 3.0;
  const double mean_gap = gap_sum / 3.0;
  std::cerr << "  a4 mean: loss ratio " << mean_ratio << ", top-1 gap " << mean_gap << "\n";
  return mean_ratio <= 0.5 && mean_gap >= 0.05;
}

// A5: z and the pairwise counts match exhaustive enumeration on 500 random
// pools of size <= 6, exactly; top-k quality under the semantic oracle order
// decays monotonically on every corpus generated here.
bool a5_evaluation_oracles() {
  Rng rng(505);
  int bad = 0;
  std::vector<rerank::RankedPool> random_pools;

  for (int it = 0; it < 500; ++it) {
    const std::size_t m = 1 + rng.below(6);
    std::vector<double> lexical(m);
    std::vector<double> semantic(m);
    // Values on a coarse grid so ties actually occur.
    for (std::size_t i = 0; i < m; ++i) lexical[i] = static_cast<double>(rng.below(5)) / 4.0;
    for (std::size_t i = 0; i < m; ++i) semantic[i] = static_cast<double>(rng.below(5)) / 4.0;

    if (rerank::z_statistic(lexical, semantic) !=
        rerank::oracle::z_by_enumeration(lexical, semantic)) {
      ++bad;
    }

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    rng.shuffle(order);
    const rerank::RankedPool pool{order, lexical, semantic};
    const auto got = rerank::pairwise_single(pool);
    const auto want = rerank::oracle::enumerate_pairs(order, lexical, semantic);
    if (got.total_pairs != want.total || got.lexical_wins != want.lexical_wins ||
        got.dominant_correct != want.dominant_correct ||
        got.relevant_pairs != want.relevant || got.fp_pairs != want.fp) {
      ++bad;
    }
    random_pools.push_back(pool);
  }

  {
    // Aggregation sums counts over pools before forming any ratio.
    const auto got = rerank::pairwise_f1_fp(random_pools);
    rerank::oracle::PairCounts sum;
    for (const auto& pool : random_pools) {
      const auto c = rerank::oracle::enumerate_pairs(pool.order, pool.lexical, pool.semantic);
      sum.total += c.total;
      sum.lexical_wins += c.lexical_wins;
      sum.dominant_correct += c.dominant_correct;
      sum.relevant += c.relevant;
      sum.fp += c.fp;
    }
    if (got.total_pairs != sum.total || got.lexical_wins != sum.lexical_wins ||
        got.dominant_correct != sum.dominant_correct ||
        got.relevant_pairs != sum.relevant || got.fp_pairs != sum.fp) {
      ++bad;
    }
    const double precision =
        sum.lexical_wins > 0
            ? static_cast<double>(sum.dominant_correct) / static_cast<double>(sum.lexical_wins)
            : 0.0;
    const double recall =
        sum.relevant > 0
            ? static_cast<double>(sum.dominant_correct) / static_cast<double>(sum.relevant)
            : 0.0;
    const double f1 =
        (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double fp_rate =
        sum.total > 0 ? static_cast<double>(sum.fp) / static_cast<double>(sum.total) : 0.0;
    if (got.precision != precision || got.recall != recall || got.f1 != f1 ||
        got.fp_rate != fp_rate) {
      ++bad;
    }
  }

  const rerank::TokenizerConfig tok;
  const rerank::HashedBowEmbedder emb(rerank::HashedBowEmbedder::kDefaultDim, tok);
  const auto metric = rerank::quality_metric("rouge_avg");
  const auto check_decay = [&bad](const std::vector<rerank::RankedPool>& ranked) {
    const double s1 = rerank::topk_quality(ranked, 1).semantic_at_k;
    const double s3 = rerank::topk_quality(ranked, 3).semantic_at_k;
    const double s5 = rerank::topk_quality(ranked, 5).semantic_at_k;
    if (!(s1 >= s3 - 1e-12 && s3 >= s5 - 1e-12)) ++bad;
  };
  for (const std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    const auto corpus =
        rerank::generate_synthetic_corpus(30, 6, {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}, seed);
    std::vector<rerank::RankedPool> ranked;
    for (const auto& pool : corpus.pools) {
      ranked.push_back(rerank::oracle_order(rerank::pool_qualities(pool, metric, tok),
                                            rerank::pool_semantics(pool, emb, tok),
                                            rerank::OracleBy::kSemantic));
    }
    check_decay(ranked);
  }
  {
    std::vector<rerank::RankedPool> ranked;
    for (const auto& pool : random_pools) {
      ranked.push_back(
          rerank::oracle_order(pool.lexical, pool.semantic, rerank::OracleBy::kSemantic));
    }
    check_decay(ranked);
  }

  if (bad > 0) std::cerr << "  a5: " << bad << " oracle disagreements\n";
  return bad == 0;
}

// A6: injected false positives (high lexical overlap, low embedder
// similarity) all receive weight zero at phi = 0.9, and training with the
// weighting on reaches a top-1 semantic stand-in at least as good as training
// with it off, averaged over seeds 1-3.
bool a6_threshold_effect() {
  const rerank::TokenizerConfig tok;
  const rerank::HashedBowEmbedder emb(rerank::HashedBowEmbedder::kDefaultDim, tok);
  long long fp_total = 0;
  long long fp_zeroed = 0;
  double weighted_sum = 0.0;
  double unweighted_sum = 0.0;

  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    rerank::SyntheticConfig synth;
    synth.fp_per_pool = 2;
    synth.seed = seed;
    const auto corpus = rerank::generate_synthetic_corpus(synth);

    for (std::size_t p = 0; p < corpus.pools.size(); ++p) {
      const auto weights = rerank::instance_weights(corpus.pools[p].candidates,
                                                    corpus.pools[p].reference, 0.9, emb);
      for (const int idx : corpus.fp_indices[p]) {
        ++fp_total;
        if (weights[static_cast<std::size_t>(idx)] == 0) ++fp_zeroed;
      }
    }

    rerank::TrainConfig config;
    config.seed = seed;
    const auto weighted = rerank::train(corpus.pools, config);

    rerank::TrainConfig off = config;
    off.loss.weighting = false;
    const auto unweighted = rerank::train(corpus.pools, off);

    const auto top1_semantic = [&](const rerank::TrainResult& result) {
      const rerank::ModelScorer scorer(rerank::backend_from_checkpoint(result.last));
      return rerank::build_report(corpus.pools, scorer, "rouge_avg", tok).bs_at_k.at(1);
    };
    const double w1 = top1_semantic(weighted);
    const double u1 = top1_semantic(unweighted);
    std::cerr << "  a6 seed " << seed << ": semantic@1 weighted " << w1 << ", unweighted "
              << u1 << "\n";
    weighted_sum += w1;
    unweighted_sum += u1;
  }

  std::cerr << "  a6 zero-weight rate on injected candidates: " << fp_zeroed << "/" << fp_total
            << "\n";
  std::cerr << "  a6 mean semantic@1: weighted " << weighted_sum / 3.0 << ", unweighted "
            << unweighted_sum / 3.0 << "\n";
  return fp_total > 0 && fp_zeroed == fp_total && weighted_sum >= unweighted_sum;
}

// A7: externally produced pools and score sidecars are ingested as-is and the
// full statistics suite is computed from them. Values are reported, never
// compared against published numbers.
bool a7_external_ingestion() {
  rerank::testing::TempDir tmp("accept_a7");
  const auto pools_path = tmp.path("external_pools.jsonl");
  const auto scores_path = tmp.path("external_scores.jsonl");

  // Hand-written records standing in for another system's output.
  rerank::testing::write_file(pools_path, R"({"id": "ext-001", "document": "Storms crossed the coast overnight. Crews restored power by noon. Schools reopened on Tuesday.", "sentences": ["Storms crossed the coast overnight.", "Crews restored power by noon.", "Schools reopened on Tuesday."], "reference": "Storms cut power overnight and crews restored it by noon.", "candidates": ["Storms cut power overnight.", "Crews restored power by noon after storms.", "Schools reopened on Tuesday morning.", "Power failed across the coast."], "scores": [0.82, 0.77, 0.41, 0.6]}
{"id": "ext-002", "document": "The council approved the budget. Libraries keep weekend hours. A new bus line starts in May.", "sentences": ["The council approved the budget.", "Libraries keep weekend hours.", "A new bus line starts in May."], "reference": "The approved budget keeps weekend library hours and adds a bus line.", "candidates": ["The budget keeps weekend library hours.", "A new bus line starts in May.", "The council met on Monday."], "scores": [0.9, 0.55, 0.2]}
{"id": "ext-003", "document": "Researchers mapped the reef. Coral cover grew four percent. Divers logged two new species.", "sentences": ["Researchers mapped the reef.", "Coral cover grew four percent.", "Divers logged two new species."], "reference": "Reef mapping found coral cover up four percent and two new species.", "candidates": ["Coral cover grew four percent.", "Divers logged two new species.", "Researchers mapped the reef.", "The reef shrank last year."], "scores": [0.7, 0.68, 0.3, 0.1]}
{"id": "ext-004", "document": "The plant reopened after repairs. Output reached full capacity. Inspections continue monthly.", "sentences": ["The plant reopened after repairs.", "Output reached full capacity.", "Inspections continue monthly."], "reference": "The repaired plant is back at full capacity with monthly inspections.", "candidates": ["The plant is back at full capacity.", "Inspections continue monthly."], "scores": [0.88, 0.35]}
)");
  rerank::testing::write_file(scores_path, R"({"id": "ext-001", "quality": [0.61, 0.55, 0.2, 0.34], "semantic": [0.88, 0.84, 0.45, 0.52]}
{"id": "ext-002", "quality": [0.72, 0.4, 0.15], "semantic": [0.91, 0.5, 0.3]}
{"id": "ext-003", "quality": [0.5, 0.48, 0.52, 0.1], "semantic": [0.7, 0.75, 0.6, 0.2]}
{"id": "ext-004", "quality": [0.66, 0.3], "semantic": [0.8, 0.42]}
)");

  auto corpus = rerank::load_pools(pools_path);
  rerank::attach_scores(scores_path, corpus);

  const rerank::TokenizerConfig tok;
  const rerank::HashedBowEmbedder emb(rerank::HashedBowEmbedder::kDefaultDim, tok);
  const auto metric = rerank::quality_metric("rouge_avg");
  std::vector<rerank::RankedPool> ranked;
  for (const auto& pool : corpus) {
    rerank::RankedPool rp;
    rp.order = rerank::ranking_order(*pool.model_scores);
    rp.lexical = rerank::pool_qualities(pool, metric, tok);
    rp.semantic = rerank::pool_semantics(pool, emb, tok);
    ranked.push_back(std::move(rp));
  }
  const auto report = rerank::aggregate_report(corpus, ranked, "rouge_avg", tok);

  bool ok = report.pools == corpus.size();
  ok = ok && report.lexical_source == "sidecar" && report.semantic_source == "sidecar";
  std::size_t histogram_total = 0;
  for (const std::size_t count : report.z_histogram) histogram_total += count;
  ok = ok && histogram_total == corpus.size();
  for (const int k : {1, 3, 5}) {
    ok = ok && std::isfinite(report.bs_at_k.at(k)) && std::isfinite(report.r_at_k.at(k));
  }
  ok = ok && std::isfinite(report.f1) && std::isfinite(report.fp_rate) &&
       std::isfinite(report.z_share_above_one) && std::isfinite(report.identical_score_rate);

  // Same ingestion through the command line.
  const auto report_path = tmp.path("report.json");
  ok = ok && run_quiet({"evaluate", "--pools", pools_path.string(), "--scores",
                        scores_path.string(), "--out", report_path.string()}) == 0;
  if (ok) {
    const auto parsed = nlohmann::json::parse(rerank::testing::read_file(report_path));
    ok = ok && parsed.at("pools").get<std::size_t>() == corpus.size();
    ok = ok && parsed.at("lexical_source").get<std::string>() == "sidecar";
    ok = ok && std::filesystem::exists(tmp.path("report.pools.csv")) &&
         std::filesystem::exists(tmp.path("report.hist.csv"));
  }
  if (ok) {
    std::cerr << "  a7 ingested " << report.pools << " external pools; f1 " << report.f1
              << ", fp rate " << report.fp_rate << " (reported, not asserted)\n";
  }
  return ok;
}

// A8: train and evaluate runs with identical inputs and seed produce
// byte-identical artifacts across two invocations.
bool a8_determinism() {
  rerank::testing::TempDir tmp("accept_a8");
  const auto pools = tmp.path("pools.jsonl");
  if (run_quiet({"gen-synthetic", "--out", pools.string(), "--docs", "20", "--candidates",
                 "4", "--noise", "0.0,0.4,0.8,0.95", "--seed", "5"}) != 0) {
    std::cerr << "  a8: corpus generation failed\n";
    return false;
  }

  const auto train_to = [&](const std::string& out) {
    return run_quiet({"train", "--pools", pools.string(), "--out", out, "--seed", "7",
                      "--set", "epochs=1", "--set", "dim=16", "--set", "vocab=256", "--set",
                      "negatives=2"});
  };
  const auto evaluate_to = [&](const std::string& ckpt, const std::string& out) {
    return run_quiet(
        {"evaluate", "--pools", pools.string(), "--checkpoint", ckpt, "--out", out});
  };

  const auto ckpt_a = tmp.path("a.ckpt.json");
  const auto ckpt_b = tmp.path("b.ckpt.json");
  const auto report_a = tmp.path("a.report.json");
  const auto report_b = tmp.path("b.report.json");
  if (train_to(ckpt_a.string()) != 0 || train_to(ckpt_b.string()) != 0 ||
      evaluate_to(ckpt_a.string(), report_a.string()) != 0 ||
      evaluate_to(ckpt_b.string(), report_b.string()) != 0) {
    std::cerr << "  a8: a run exited non-zero\n";
    return false;
  }

  const auto same = [](const std::filesystem::path& x, const std::filesystem::path& y) {
    const std::string left = rerank::testing::read_file(x);
    return !left.empty() && left == rerank::testing::read_file(y);
  };
  const bool ok = same(ckpt_a, ckpt_b) &&
                  same(ckpt_a.string() + ".log.jsonl", ckpt_b.string() + ".log.jsonl") &&
                  same(report_a, report_b) &&
                  same(tmp.path("a.report.pools.csv"), tmp.path("b.report.pools.csv")) &&
                  same(tmp.path("a.report.hist.csv"), tmp.path("b.report.hist.csv"));
  if (!ok) std::cerr << "  a8: artifacts differ between invocations\n";
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* tag;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {"A1 metric oracles", a1_metric_oracles},
      {"A2 gradient checks", a2_gradient_checks},
      {"A3 loss semantics", a3_loss_semantics},
      {"A4 desk-scale training", a4_desk_scale_training},
      {"A5 evaluation oracles", a5_evaluation_oracles},
      {"A6 threshold effect", a6_threshold_effect},
      {"A7 external ingestion", a7_external_ingestion},
      {"A8 determinism", a8_determinism},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    bool ok = false;
    try {
      ok = criterion.fn();
    } catch (const std::exception& e) {
      std::cerr << "  " << criterion.tag << " raised: " << e.what() << "\n";
    }
    std::cout << criterion.tag << ": " << (ok ? "pass" : "fail") << std::endl;
    if (!ok) ++failed;
  }
  return failed;
}
