#include "rerank/pool.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

#include "rerank/error.hpp"
#include "rerank/rng.hpp"

namespace rerank {

namespace {

using nlohmann::json;

std::string strip_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

[[noreturn]] void record_error(const std::filesystem::path& path, std::size_t line,
                               const std::string& detail) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + detail);
}

std::vector<std::string> string_array(const json& rec, const char* field,
                                      const std::filesystem::path& path,
                                      std::size_t line) {
  const auto& value = rec.at(field);
  if (!value.is_array()) record_error(path, line, std::string("field \"") + field + "\" must be an array of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) record_error(path, line, std::string("field \"") + field + "\" must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string string_field(const json& rec, const char* field,
                         const std::filesystem::path& path, std::size_t line) {
  if (!rec.contains(field)) record_error(path, line, std::string("missing field \"") + field + "\"");
  const auto& value = rec.at(field);
  if (!value.is_string()) record_error(path, line, std::string("field \"") + field + "\" must be a string");
  return value.get<std::string>();
}

std::vector<double> double_array(const json& rec, const char* field,
                                 const std::filesystem::path& path,
                                 std::size_t line) {
  const auto& value = rec.at(field);
  if (!value.is_array()) record_error(path, line, std::string("field \"") + field + "\" must be an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_number()) record_error(path, line, std::string("field \"") + field + "\" must be an array of numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::vector<std::string> segment_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    current.push_back(c);
    const bool final_punct = c == '.' || c == '!' || c == '?';
    const bool at_boundary =
        final_punct && (i + 1 == text.size() ||
                        std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (at_boundary) {
      sentences.push_back(current);
      current.clear();
      while (i + 1 < text.size() &&
             std::isspace(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
      }
    }
  }
  if (!strip_whitespace(current).empty()) sentences.push_back(current);
  return sentences;
}

void for_each_pool(const std::filesystem::path& path,
                   const std::function<void(CandidatePool&&)>& sink) {
  std::ifstream in = open_for_read(path);
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip_whitespace(line).empty()) continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      record_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) record_error(path, line_no, "record must be a JSON object");

    CandidatePool pool;
    pool.document.id = string_field(rec, "id", path, line_no);
    if (!seen_ids.insert(pool.document.id).second) {
      record_error(path, line_no, "duplicate document id \"" + pool.document.id + "\"");
    }
    pool.document.text = string_field(rec, "document", path, line_no);
    pool.reference = string_field(rec, "reference", path, line_no);
    if (!rec.contains("candidates")) record_error(path, line_no, "missing field \"candidates\"");
    pool.candidates = string_array(rec, "candidates", path, line_no);
    if (pool.candidates.empty()) record_error(path, line_no, "field \"candidates\" must be non-empty");

    if (rec.contains("scores")) {
      auto scores = double_array(rec, "scores", path, line_no);
      if (scores.size() != pool.candidates.size()) {
        record_error(path, line_no, "field \"scores\" length does not match candidate count");
      }
      pool.model_scores = std::move(scores);
    }

    if (rec.contains("sentences")) {
      pool.document.sentences = string_array(rec, "sentences", path, line_no);
      if (pool.document.sentences.empty()) {
        record_error(path, line_no, "field \"sentences\" must be non-empty when present");
      }
      std::string joined;
      for (const auto& s : pool.document.sentences) joined += s;
      if (strip_whitespace(joined) != strip_whitespace(pool.document.text)) {
        record_error(path, line_no,
                     "field \"sentences\" must concatenate to the document text");
      }
    } else {
      pool.document.sentences = segment_sentences(pool.document.text);
      if (pool.document.sentences.empty()) {
        record_error(path, line_no, "field \"document\" yields no sentences");
      }
    }
    sink(std::move(pool));
  }
}

Corpus load_pools(const std::filesystem::path& path) {
  Corpus corpus;
  for_each_pool(path, [&](CandidatePool&& pool) { corpus.push_back(std::move(pool)); });
  return corpus;
}

void write_pools(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out = open_for_write(path);
  for (const auto& pool : corpus) {
    json rec;
    rec["id"] = pool.document.id;
    rec["document"] = pool.document.text;
    // Empty means "not supplied": readers re-segment the text instead.
    if (!pool.document.sentences.empty()) rec["sentences"] = pool.document.sentences;
    rec["reference"] = pool.reference;
    rec["candidates"] = pool.candidates;
    out << rec.dump() << '\n';
  }
}

void attach_scores(const std::filesystem::path& path, Corpus& corpus) {
  std::unordered_map<std::string, CandidatePool*> by_id;
  for (auto& pool : corpus) by_id[pool.document.id] = &pool;

  std::ifstream in = open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip_whitespace(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      record_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    const std::string id = string_field(rec, "id", path, line_no);
    const auto it = by_id.find(id);
    if (it == by_id.end()) record_error(path, line_no, "unknown document id \"" + id + "\"");
    CandidatePool& pool = *it->second;
    const std::size_t m = pool.candidates.size();
    if (rec.contains("quality")) {
      auto q = double_array(rec, "quality", path, line_no);
      if (q.size() != m) record_error(path, line_no, "field \"quality\" length does not match candidate count");
      pool.cached_quality = std::move(q);
    }
    if (rec.contains("semantic")) {
      auto s = double_array(rec, "semantic", path, line_no);
      if (s.size() != m) record_error(path, line_no, "field \"semantic\" length does not match candidate count");
      pool.cached_semantic = std::move(s);
    }
  }
}

void write_scores(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out = open_for_write(path);
  for (const auto& pool : corpus) {
    json rec;
    rec["id"] = pool.document.id;
    if (pool.cached_quality) rec["quality"] = *pool.cached_quality;
    if (pool.cached_semantic) rec["semantic"] = *pool.cached_semantic;
    out << rec.dump() << '\n';
  }
}

CandidatePool dedupe_candidates(const CandidatePool& pool) {
  CandidatePool out;
  out.document = pool.document;
  out.reference = pool.reference;
  if (pool.cached_quality) out.cached_quality.emplace();
  if (pool.cached_semantic) out.cached_semantic.emplace();

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
    if (!seen.insert(pool.candidates[i]).second) continue;
    out.candidates.push_back(pool.candidates[i]);
    if (pool.cached_quality) out.cached_quality->push_back((*pool.cached_quality)[i]);
    if (pool.cached_semantic) out.cached_semantic->push_back((*pool.cached_semantic)[i]);
  }
  return out;
}

NegativeSet sample_negatives(const Corpus& corpus, const std::string& anchor_id,
                             int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("sample_negatives: count must be >= 0");
  // Flatten (pool, candidate) pairs outside the anchor document, in corpus order.
  std::vector<std::pair<const CandidatePool*, std::size_t>> population;
  for (const auto& pool : corpus) {
    if (pool.document.id == anchor_id) continue;
    for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
      population.emplace_back(&pool, i);
    }
  }
  if (population.size() < static_cast<std::size_t>(count)) {
    throw DataError("sample_negatives: corpus has only " +
                    std::to_string(population.size()) +
                    " candidates outside document \"" + anchor_id +
                    "\", need " + std::to_string(count));
  }
  Rng rng(seed);
  NegativeSet out;
  for (const std::size_t pick :
       rng.sample_without_replacement(population.size(), count)) {
    const auto& [pool, idx] = population[pick];
    out.summaries.push_back(pool->candidates[idx]);
    out.source_ids.push_back(pool->document.id);
  }
  return out;
}

}  // namespace rerank
