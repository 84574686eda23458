#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/analysis.hpp"
#include "rhp/corpus.hpp"
#include "rhp/model.hpp"
#include "rhp/training.hpp"

namespace rhp {

struct PathConfig {
  std::string reviews;
  std::string reviewers;
  std::string manifest;
  std::string lexicon;    // empty: bundled lexicon
  std::string stopwords;  // empty: bundled list
  std::string checkpoint;
  std::string pretrained_model;  // Hugging Face style model directory
};

struct EncoderConfig {
  std::string backend = "test";  // "test" or "pretrained"
  std::size_t text_dim = 128;
  std::size_t embedding_dim = 64;
  std::uint64_t hash_seed = 0x5EED;
  bool lowercase = true;
  std::size_t vocab_min_count = 2;
  std::size_t vocab_max_size = 30000;
};

struct SplitConfig {
  SplitRatios ratios;
  bool group_by_reviewer = false;
  std::optional<std::string> reference_date;  // YYYY-MM-DD
};

struct AnalysisConfig {
  std::size_t top_k = kDefaultTopK;
  std::size_t min_freq = kDefaultBigramMinFreq;
  std::optional<std::size_t> sample_per_class;
  std::string split = "all";
};

struct ExplainConfig {
  std::size_t steps = 50;
  std::size_t top_k = 10;
  std::size_t count = 5;
  std::string split = "test";
  std::vector<std::string> review_ids;
};

// Everything a run depends on. The effective value (defaults, then the
// config file, then command-line flags) is written next to each run's
// outputs.
struct RunConfig {
  std::uint64_t seed = 0;
  PathConfig paths;
  EncoderConfig encoder;
  ModelConfig model;
  TrainConfig train;
  SplitConfig split;
  AnalysisConfig analysis;
  ExplainConfig explain;
  std::string eval_split = "test";

  nlohmann::json to_json() const;
  // Unknown keys are rejected so typos do not pass silently.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace rhp
