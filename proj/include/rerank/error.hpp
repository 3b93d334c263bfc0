#pragma once

#include <stdexcept>
#include <string>

namespace rerank {

// Malformed or inconsistent input data (files, schemas, ids).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite losses, degenerate embeddings and the like.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rerank
