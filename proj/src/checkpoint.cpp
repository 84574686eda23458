#include "rhp/checkpoint.hpp"

#include <bit>
#include <fstream>

namespace rhp {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr const char* kFormat = "rhp-checkpoint";
constexpr int kVersion = 1;

nlohmann::json range_json(const FeatureRange& r) { return {{"min", r.min}, {"max", r.max}}; }

FeatureRange range_from(const nlohmann::json& j) { return {j.at("min").get<double>(), j.at("max").get<double>()}; }

}  // namespace

nlohmann::json feature_stats_to_json(const FeatureStats& stats) {
  return {{"expertise", range_json(stats.expertise)},
          {"age_days", range_json(stats.age_days)},
          {"range", {{"a", stats.range.a}, {"b", stats.range.b}}}};
}

FeatureStats feature_stats_from_json(const nlohmann::json& j) {
  FeatureStats s;
  s.expertise = range_from(j.at("expertise"));
  s.age_days = range_from(j.at("age_days"));
  s.range = {j.at("range").at("a").get<double>(), j.at("range").at("b").get<double>()};
  if (s.expertise.min > s.expertise.max || s.age_days.min > s.age_days.max || !(s.range.a < s.range.b)) {
    throw DataError("inconsistent feature statistics in checkpoint");
  }
  return s;
}

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a64(config.dump())); }

void save_checkpoint(const std::filesystem::path& dir, const FusionModel& model, const FeatureStats& stats,
                     const nlohmann::json& run_config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory '" + dir.string() + "': " + ec.message());

  const auto& params = model.parameters();
  auto tensors = nlohmann::json::array();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    tensors.push_back({{"name", params.name(i)},
                       {"shape", params.shape(i)},
                       {"offset", offset},
                       {"trainable", params.trainable(i)}});
    offset += params.values(i).size();
  }
  nlohmann::json manifest{{"format", kFormat},
                          {"version", kVersion},
                          {"model", model.config().to_json()},
                          {"encoder", model.encoder().describe()},
                          {"encoder_identity", model.encoder().identity()},
                          {"feature_stats", feature_stats_to_json(stats)},
                          {"run_config", run_config},
                          {"config_hash", config_hash(run_config)},
                          {"parameters", {{"file", "parameters.bin"}, {"dtype", "float64-le"}, {"count", offset}}},
                          {"tensors", tensors},
                          {"vocab", "vocab.txt"}};

  {
    std::ofstream out(dir / "parameters.bin", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + (dir / "parameters.bin").string() + "'");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto v = params.values(i);
      out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
    if (!out) throw IoError("error writing parameters.bin");
  }
  model.encoder().tokenizer().vocabulary().save(dir / "vocab.txt");
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write '" + (dir / "manifest.json").string() + "'");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("error writing manifest.json");
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open checkpoint manifest '" + manifest_path.string() + "'");
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  try {
    if (m.at("format").get<std::string>() != kFormat || m.at("version").get<int>() != kVersion) {
      throw DataError("'" + manifest_path.string() + "' is not a version-1 rhp checkpoint");
    }
    auto encoder = make_encoder(m.at("encoder"), Vocabulary::load(dir / m.at("vocab").get<std::string>()));
    if (encoder->identity() != m.at("encoder_identity").get<std::string>()) {
      throw DataError("encoder identity mismatch: checkpoint was written by '" +
                      m.at("encoder_identity").get<std::string>() + "', rebuilt '" + encoder->identity() + "'");
    }

    ParameterSet params;
    std::size_t total = 0;
    for (const auto& t : m.at("tensors")) {
      if (t.at("offset").get<std::size_t>() != total) throw DataError("tensor offsets are not contiguous");
      const auto i = params.add(t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>(),
                                t.at("trainable").get<bool>());
      total += params.values(i).size();
    }
    if (total != m.at("parameters").at("count").get<std::size_t>()) throw DataError("parameter count mismatch");

    const auto bin = dir / m.at("parameters").at("file").get<std::string>();
    std::ifstream pin(bin, std::ios::binary);
    if (!pin) throw IoError("cannot open '" + bin.string() + "'");
    if (std::filesystem::file_size(bin) != total * sizeof(double)) {
      throw DataError("'" + bin.string() + "' has the wrong size (truncated checkpoint?)");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto v = params.values(i);
      pin.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    }
    if (!pin) throw IoError("error reading '" + bin.string() + "'");
    if (const auto bad = params.first_non_finite(); !bad.empty()) {
      throw DataError("checkpoint tensor '" + bad + "' holds non-finite values");
    }

    const auto model_config = ModelConfig::from_json(m.at("model"));
    FusionModel model(std::move(encoder), model_config, std::move(params));
    return {std::move(model), feature_stats_from_json(m.at("feature_stats")), m.at("run_config"),
            m.at("config_hash").get<std::string>(), m.at("encoder_identity").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint manifest: " + std::string(e.what()));
  }
}

}  // namespace rhp
