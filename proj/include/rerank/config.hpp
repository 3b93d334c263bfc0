#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "rerank/losses.hpp"
#include "rerank/tokenize.hpp"

namespace rerank {

struct TrainConfig {
  int epochs = 5;
  int batch_size = 4;          // pools per optimizer step
  double learning_rate = 2e-3;
  std::string optimizer = "adafactor";  // or "sgd"
  int validate_every = 1000;   // steps between validation passes
  std::uint64_t seed = 0;

  int dim = 32;                // tiny-backend embedding dimension
  int vocab = 2048;            // tiny-backend hashed vocabulary rows
  double init_scale = 1.0;     // stddev of the Gaussian embedding init
  bool normalize_encodings = false;  // L2-normalize sentence/summary vectors

  std::string metric = "rouge_avg";        // quality metric M
  std::string selection_metric = "semantic";  // best-checkpoint criterion; or "lexical"

  LossConfig loss;
  TokenizerConfig tokenizer;
};

// Flat key=value lines; '#' starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Applies "key=value" settings on top of a config. "phi=off" disables
// instance weighting. Throws std::invalid_argument on unknown keys or
// unparsable values.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);
void apply_settings(TrainConfig& config, const std::map<std::string, std::string>& settings);

// Stable textual form (JSON object) of the resolved config, and its inverse.
// Doubles survive the round trip exactly.
std::string describe_config(const TrainConfig& config);
TrainConfig parse_config_description(const std::string& json_text);

}  // namespace rerank
