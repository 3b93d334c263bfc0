#include "rerank/encoder.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "rerank/error.hpp"
#include "rerank/rng.hpp"
#include "rerank/similarity.hpp"

namespace rerank {

namespace {

constexpr double kNormEps = 1e-12;

}  // namespace

TinyEmbeddingBackend::TinyEmbeddingBackend(int dim, int vocab, TokenizerConfig tok,
                                           bool normalize)
    : dim_(dim), vocab_(vocab), tok_(tok), normalize_(normalize),
      embedding_(Eigen::MatrixXd::Zero(dim, vocab)) {
  if (dim < 1) throw std::invalid_argument("backend: dim must be >= 1");
  if (vocab < 1) throw std::invalid_argument("backend: vocab must be >= 1");
}

void TinyEmbeddingBackend::init_parameters(std::uint64_t seed, double scale) {
  Rng rng(mix_seed({seed, 0x696e6974ULL}));
  for (int c = 0; c < vocab_; ++c) {
    for (int r = 0; r < dim_; ++r) {
      embedding_(r, c) = scale * rng.normal();
    }
  }
}

void TinyEmbeddingBackend::set_embedding(Eigen::MatrixXd table) {
  if (table.rows() != dim_ || table.cols() != vocab_) {
    throw std::invalid_argument("backend: embedding table must be " +
                                std::to_string(dim_) + "x" + std::to_string(vocab_));
  }
  embedding_ = std::move(table);
}

int TinyEmbeddingBackend::slot(std::string_view token) const {
  return static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(vocab_));
}

Eigen::VectorXd TinyEmbeddingBackend::encode_tokens(const TokenSequence& tokens) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  if (tokens.empty()) return v;
  for (const std::string& token : tokens) v += embedding_.col(slot(token));
  v /= static_cast<double>(tokens.size());
  if (normalize_) {
    const double norm = v.norm();
    if (norm > kNormEps) v /= norm;
  }
  return v;
}

Eigen::MatrixXd TinyEmbeddingBackend::encode_document(const Document& doc) const {
  const std::vector<std::string> fallback =
      doc.sentences.empty() ? segment_sentences(doc.text) : std::vector<std::string>{};
  const std::vector<std::string>& sentences =
      doc.sentences.empty() ? fallback : doc.sentences;
  Eigen::MatrixXd out(dim_, static_cast<Eigen::Index>(sentences.size()));
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = encode_tokens(tokenize(sentences[k], tok_));
  }
  return out;
}

Eigen::VectorXd TinyEmbeddingBackend::encode_summary(const std::string& text) const {
  return encode_tokens(tokenize(text, tok_));
}

void TinyEmbeddingBackend::accumulate_grad(const TokenSequence& tokens,
                                           const Eigen::VectorXd& d_encoded,
                                           Eigen::MatrixXd& grad) const {
  if (tokens.empty()) return;
  if (grad.rows() != dim_ || grad.cols() != vocab_) {
    throw std::invalid_argument("backend: gradient buffer shape mismatch");
  }
  Eigen::VectorXd d_pooled = d_encoded;
  if (normalize_) {
    // v = u / |u|  =>  du = (d_v - v (v . d_v)) / |u|; below the eps guard the
    // forward pass skipped normalization, so the chain is the identity there.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim_);
    for (const std::string& token : tokens) u += embedding_.col(slot(token));
    u /= static_cast<double>(tokens.size());
    const double norm = u.norm();
    if (norm > kNormEps) {
      const Eigen::VectorXd v = u / norm;
      d_pooled = (d_encoded - v * v.dot(d_encoded)) / norm;
    }
  }
  d_pooled /= static_cast<double>(tokens.size());
  for (const std::string& token : tokens) grad.col(slot(token)) += d_pooled;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  nlohmann::ordered_json j;
  j["backend"] = cp.backend;
  j["dim"] = cp.embedding.rows();
  j["vocab"] = cp.embedding.cols();
  j["step"] = cp.step;
  j["config"] = nlohmann::ordered_json::parse(describe_config(cp.config));
  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (const ValidationPoint& p : cp.history) {
    history.push_back({{"step", p.step},
                       {"lexical", p.selected_lexical},
                       {"semantic", p.selected_semantic}});
  }
  j["history"] = std::move(history);
  std::vector<double> flat(cp.embedding.data(),
                           cp.embedding.data() + cp.embedding.size());
  j["embedding"] = std::move(flat);

  std::ofstream out(path);
  if (!out) throw DataError("checkpoint: cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw DataError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint: " + path.string() + ": " + e.what());
  }

  Checkpoint cp;
  try {
    cp.backend = j.at("backend").get<std::string>();
    cp.step = j.at("step").get<long long>();
    cp.config = parse_config_description(j.at("config").dump());
    const auto rows = j.at("dim").get<Eigen::Index>();
    const auto cols = j.at("vocab").get<Eigen::Index>();
    const auto& flat = j.at("embedding");
    if (!flat.is_array() ||
        static_cast<Eigen::Index>(flat.size()) != rows * cols) {
      throw DataError("checkpoint: embedding size does not match dim*vocab");
    }
    cp.embedding.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      cp.embedding.data()[i] = flat.at(static_cast<std::size_t>(i)).get<double>();
    }
    for (const auto& node : j.at("history")) {
      ValidationPoint p;
      p.step = node.at("step").get<long long>();
      p.selected_lexical = node.at("lexical").get<double>();
      p.selected_semantic = node.at("semantic").get<double>();
      cp.history.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint: " + path.string() + ": " + e.what());
  }
  if (cp.backend != "tiny") {
    throw DataError("checkpoint: unknown backend '" + cp.backend + "'");
  }
  if (cp.embedding.rows() != cp.config.dim || cp.embedding.cols() != cp.config.vocab) {
    throw DataError("checkpoint: embedding shape disagrees with config");
  }
  return cp;
}

TinyEmbeddingBackend backend_from_checkpoint(const Checkpoint& cp) {
  TinyEmbeddingBackend backend(cp.config.dim, cp.config.vocab, cp.config.tokenizer,
                               cp.config.normalize_encodings);
  backend.set_embedding(cp.embedding);
  return backend;
}

std::vector<double> ModelScorer::score(const CandidatePool& pool) const {
  const Eigen::MatrixXd doc = backend_.encode_document(pool.document);
  std::vector<double> out;
  out.reserve(pool.candidates.size());
  for (const std::string& candidate : pool.candidates) {
    out.push_back(similarity(backend_.encode_summary(candidate), doc).total);
  }
  return out;
}

std::vector<double> OracleLexicalScorer::score(const CandidatePool& pool) const {
  const TokenSequence ref = tokenize(pool.reference, tok_);
  std::vector<double> out;
  out.reserve(pool.candidates.size());
  for (const std::string& candidate : pool.candidates) {
    out.push_back(metric_(tokenize(candidate, tok_), ref));
  }
  return out;
}

std::vector<double> RandomScorer::score(const CandidatePool& pool) const {
  Rng rng(mix_seed({seed_, fnv1a64(pool.document.id)}));
  std::vector<double> out;
  out.reserve(pool.candidates.size());
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
    out.push_back(rng.uniform01());
  }
  return out;
}

std::unique_ptr<CandidateScorer> make_scorer(const Checkpoint& cp) {
  if (cp.backend != "tiny") {
    throw DataError("scorer: unsupported backend '" + cp.backend + "'");
  }
  return std::make_unique<ModelScorer>(backend_from_checkpoint(cp));
}

}  // namespace rerank
