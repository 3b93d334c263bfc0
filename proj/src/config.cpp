#include "rerank/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "rerank/error.hpp"

namespace rerank {
namespace {

std::string strip(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects an unsigned integer, got '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument("config: " + key + " expects an unsigned integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw std::invalid_argument("config: " + key + " expects true/false, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config: cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

void apply_setting(TrainConfig& config, const std::string& key, const std::string& value) {
  // Validate before assigning: a rejected setting must leave the config
  // untouched.
  if (key == "epochs") {
    const int v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("config: epochs must be >= 0");
    config.epochs = v;
  } else if (key == "batch_size") {
    const int v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    config.batch_size = v;
  } else if (key == "learning_rate" || key == "lr") {
    const double v = parse_double(key, value);
    if (v <= 0) throw std::invalid_argument("config: learning_rate must be > 0");
    config.learning_rate = v;
  } else if (key == "optimizer") {
    if (value != "adafactor" && value != "sgd")
      throw std::invalid_argument("config: optimizer must be adafactor or sgd");
    config.optimizer = value;
  } else if (key == "validate_every") {
    const int v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: validate_every must be >= 1");
    config.validate_every = v;
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else if (key == "dim") {
    const int v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: dim must be >= 1");
    config.dim = v;
  } else if (key == "vocab") {
    const int v = parse_int(key, value);
    if (v < 1) throw std::invalid_argument("config: vocab must be >= 1");
    config.vocab = v;
  } else if (key == "init_scale") {
    const double v = parse_double(key, value);
    if (v <= 0) throw std::invalid_argument("config: init_scale must be > 0");
    config.init_scale = v;
  } else if (key == "normalize_encodings") {
    config.normalize_encodings = parse_bool(key, value);
  } else if (key == "metric") {
    quality_metric(value);  // validates the name
    config.metric = value;
  } else if (key == "selection_metric") {
    if (value != "semantic" && value != "lexical")
      throw std::invalid_argument("config: selection_metric must be semantic or lexical");
    config.selection_metric = value;
  } else if (key == "lambda") {
    const double v = parse_double(key, value);
    if (v < 0) throw std::invalid_argument("config: lambda must be >= 0");
    config.loss.lambda = v;
  } else if (key == "phi") {
    if (value == "off") {
      config.loss.weighting = false;
    } else {
      const double phi = parse_double(key, value);
      if (phi < 0.0 || phi > 1.0)
        throw std::invalid_argument("config: phi must lie in [0, 1]");
      config.loss.phi = phi;
      config.loss.weighting = true;
    }
  } else if (key == "weighting") {
    config.loss.weighting = parse_bool(key, value);
  } else if (key == "gamma1") {
    config.loss.gamma1 = parse_double(key, value);
  } else if (key == "gamma2") {
    config.loss.gamma2 = parse_double(key, value);
  } else if (key == "negatives") {
    const int v = parse_int(key, value);
    if (v < 0) throw std::invalid_argument("config: negatives must be >= 0");
    config.loss.negatives = v;
  } else if (key == "lowercase") {
    config.tokenizer.lowercase = parse_bool(key, value);
  } else if (key == "stem") {
    config.tokenizer.stem = parse_bool(key, value);
  } else if (key == "drop_stopwords") {
    config.tokenizer.drop_stopwords = parse_bool(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void apply_settings(TrainConfig& config, const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) apply_setting(config, key, value);
}

TrainConfig parse_config_description(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  TrainConfig c;
  try {
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.optimizer = j.at("optimizer").get<std::string>();
    c.validate_every = j.at("validate_every").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.dim = j.at("dim").get<int>();
    c.vocab = j.at("vocab").get<int>();
    c.init_scale = j.at("init_scale").get<double>();
    c.normalize_encodings = j.at("normalize_encodings").get<bool>();
    c.metric = j.at("metric").get<std::string>();
    c.selection_metric = j.at("selection_metric").get<std::string>();
    c.loss.lambda = j.at("lambda").get<double>();
    c.loss.phi = j.at("phi").get<double>();
    c.loss.weighting = j.at("weighting").get<bool>();
    c.loss.gamma1 = j.at("gamma1").get<double>();
    c.loss.gamma2 = j.at("gamma2").get<double>();
    c.loss.negatives = j.at("negatives").get<int>();
    c.tokenizer.lowercase = j.at("lowercase").get<bool>();
    c.tokenizer.stem = j.at("stem").get<bool>();
    c.tokenizer.drop_stopwords = j.at("drop_stopwords").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  quality_metric(c.metric);
  if (c.optimizer != "adafactor" && c.optimizer != "sgd")
    throw DataError("config: optimizer must be adafactor or sgd");
  if (c.selection_metric != "semantic" && c.selection_metric != "lexical")
    throw DataError("config: selection_metric must be semantic or lexical");
  return c;
}

std::string describe_config(const TrainConfig& config) {
  nlohmann::ordered_json j;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["learning_rate"] = config.learning_rate;
  j["optimizer"] = config.optimizer;
  j["validate_every"] = config.validate_every;
  j["seed"] = config.seed;
  j["dim"] = config.dim;
  j["vocab"] = config.vocab;
  j["init_scale"] = config.init_scale;
  j["normalize_encodings"] = config.normalize_encodings;
  j["metric"] = config.metric;
  j["selection_metric"] = config.selection_metric;
  j["lambda"] = config.loss.lambda;
  j["phi"] = config.loss.phi;
  j["weighting"] = config.loss.weighting;
  j["gamma1"] = config.loss.gamma1;
  j["gamma2"] = config.loss.gamma2;
  j["negatives"] = config.loss.negatives;
  j["lowercase"] = config.tokenizer.lowercase;
  j["stem"] = config.tokenizer.stem;
  j["drop_stopwords"] = config.tokenizer.drop_stopwords;
  return j.dump();
}

}  // namespace rerank
