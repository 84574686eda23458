#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "rhp/features.hpp"
#include "rhp/model.hpp"

namespace rhp {

nlohmann::json feature_stats_to_json(const FeatureStats& stats);
FeatureStats feature_stats_from_json(const nlohmann::json& j);

struct Checkpoint {
  FusionModel model;
  FeatureStats stats;
  // Effective run configuration the model was trained with.
  nlohmann::json run_config;
  std::string config_hash;
  std::string encoder_identity;
};

// Hex FNV-1a of the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

// Writes <dir>/manifest.json, <dir>/parameters.bin (little-endian float64 in
// tensor order) and <dir>/vocab.txt. Existing files are replaced.
void save_checkpoint(const std::filesystem::path& dir, const FusionModel& model, const FeatureStats& stats,
                     const nlohmann::json& run_config);

// Throws IoError / DataError for missing, truncated or inconsistent files.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace rhp
