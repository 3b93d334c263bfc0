#include "rerank/embedder.hpp"

#include <Eigen/Core>
#include <algorithm>

#include "doctest.h"
#include "rerank/error.hpp"

namespace rerank {
namespace {

TEST_SUITE("embedder") {

TEST_CASE("hashed bag-of-tokens embeddings are deterministic unit vectors") {
  const HashedBowEmbedder embedder;
  CHECK(embedder.dim() == 256);
  const Eigen::VectorXd v = embedder.embed("a small test sentence");
  CHECK(v.size() == 256);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((v.array() >= 0.0).all());
  CHECK(v == embedder.embed("a small test sentence"));
}

TEST_CASE("bucket indices stay in range and repeat per token") {
  const HashedBowEmbedder embedder(32);
  for (const char* t : {"alpha", "beta", "gamma", "x1"}) {
    const int b = embedder.bucket(t);
    CHECK(b >= 0);
    CHECK(b < 32);
    CHECK(b == embedder.bucket(t));
  }
}

TEST_CASE("semantic similarity is the embedding inner product") {
  const HashedBowEmbedder embedder;
  CHECK(semantic_similarity("same words here", "same words here", embedder) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Recompute the cosine directly from the emitted vectors.
  const double sim = semantic_similarity("the cat sat", "the cat ran", embedder);
  const double dot = embedder.embed("the cat sat").dot(embedder.embed("the cat ran"));
  CHECK(sim == doctest::Approx(dot).epsilon(1e-12));
  CHECK(sim > 0.0);
  CHECK(sim < 1.0);
}

TEST_CASE("empty text makes the embedder degenerate") {
  const HashedBowEmbedder embedder;
  CHECK_THROWS_AS(semantic_similarity("", "anything", embedder), NumericError);
  CHECK_THROWS_AS(semantic_similarity("anything", "   ", embedder), NumericError);
}

TEST_CASE("greedy matching hits the trivial endpoints") {
  const HashedBowEmbedder embedder;
  const TokenSequence same{"alpha", "beta", "gamma"};
  CHECK(greedy_semantic_f1(same, same, embedder).f1 == doctest::Approx(1.0));

  CHECK(greedy_semantic_f1({}, same, embedder).f1 == 0.0);
  CHECK(greedy_semantic_f1(same, {}, embedder).precision == 0.0);
}

TEST_CASE("greedy matching equals the exhaustive max-matching computation") {
  const HashedBowEmbedder embedder(64);
  const TokenSequence cand{"red", "green", "blue"};
  const TokenSequence ref{"red", "yellow"};

  const auto best_against = [&](const TokenSequence& from, const TokenSequence& to) {
    double sum = 0.0;
    for (const auto& f : from) {
      double best = 0.0;
      for (const auto& t : to) {
        best = std::max(best, embedder.embed(f).dot(embedder.embed(t)));
      }
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  const double p = best_against(cand, ref);
  const double r = best_against(ref, cand);

  const MetricScore got = greedy_semantic_f1(cand, ref, embedder);
  CHECK(got.precision == doctest::Approx(p).epsilon(1e-12));
  CHECK(got.recall == doctest::Approx(r).epsilon(1e-12));
  CHECK(got.f1 == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
}

}  // TEST_SUITE

}  // namespace
}  // namespace rerank
