#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rerank/pool.hpp"
#include "rerank/rng.hpp"

namespace rerank::testing {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("rerank_" + tag + "_" + std::to_string(++counter) + "_" +
            std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline CandidatePool make_pool(const std::string& id, const std::string& document,
                               const std::string& reference,
                               std::vector<std::string> candidates) {
  CandidatePool pool;
  pool.document.id = id;
  pool.document.text = document;
  pool.reference = reference;
  pool.candidates = std::move(candidates);
  return pool;
}

// Small corpus whose candidates are shuffled word subsets of the document, so
// qualities are varied but nothing is degenerate.
inline Corpus small_corpus(int n_pools, std::uint64_t seed, int candidates = 4) {
  Corpus corpus;
  Rng rng(seed);
  for (int p = 0; p < n_pools; ++p) {
    std::vector<std::string> words;
    for (int w = 0; w < 12; ++w) {
      words.push_back("w" + std::to_string(rng.below(30)));
    }
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      text += words[i];
      text += i + 1 == words.size() / 2 ? ". " : " ";
    }
    std::string reference;
    for (int w = 0; w < 6; ++w) reference += words[w] + (w == 5 ? "" : " ");

    std::vector<std::string> cands;
    for (int c = 0; c < candidates; ++c) {
      std::string cand;
      const int keep = 2 + static_cast<int>(rng.below(5));
      for (int w = 0; w < keep; ++w) {
        cand += words[rng.below(words.size())] + (w + 1 == keep ? "" : " ");
      }
      cands.push_back(cand);
    }
    corpus.push_back(make_pool("p" + std::to_string(p), text, reference, cands));
  }
  return corpus;
}

}  // namespace rerank::testing
