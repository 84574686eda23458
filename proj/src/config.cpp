#include "rhp/config.hpp"

#include <fstream>

namespace rhp {

namespace {

void reject_unknown(const nlohmann::json& defaults, const nlohmann::json& given, const std::string& where) {
  if (!given.is_object()) throw DataError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw DataError("unknown config key '" + path + "'");
    if (defaults.at(key).is_object() && !value.is_null()) reject_unknown(defaults.at(key), value, path);
  }
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  auto train_json = train.to_json();
  train_json.erase("seed");
  return {{"seed", seed},
          {"paths",
           {{"reviews", paths.reviews},
            {"reviewers", paths.reviewers},
            {"manifest", paths.manifest},
            {"lexicon", paths.lexicon},
            {"stopwords", paths.stopwords},
            {"checkpoint", paths.checkpoint},
            {"pretrained_model", paths.pretrained_model}}},
          {"encoder",
           {{"backend", encoder.backend},
            {"text_dim", encoder.text_dim},
            {"embedding_dim", encoder.embedding_dim},
            {"hash_seed", encoder.hash_seed},
            {"lowercase", encoder.lowercase},
            {"vocab_min_count", encoder.vocab_min_count},
            {"vocab_max_size", encoder.vocab_max_size}}},
          {"model", model.to_json()},
          {"train", train_json},
          {"split",
           {{"train", split.ratios.train},
            {"valid", split.ratios.valid},
            {"test", split.ratios.test},
            {"group_by_reviewer", split.group_by_reviewer},
            {"reference_date", optional_json(split.reference_date)}}},
          {"analysis",
           {{"top_k", analysis.top_k},
            {"min_freq", analysis.min_freq},
            {"sample_per_class", optional_json(analysis.sample_per_class)},
            {"split", analysis.split}}},
          {"explain",
           {{"steps", explain.steps},
            {"top_k", explain.top_k},
            {"count", explain.count},
            {"split", explain.split},
            {"review_ids", explain.review_ids}}},
          {"eval", {{"split", eval_split}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& given) {
  const RunConfig defaults;
  nlohmann::json j = defaults.to_json();
  reject_unknown(j, given, "");
  j.merge_patch(given);
  // merge_patch drops null members; restore them so lookups below succeed.
  const auto base = defaults.to_json();
  for (const auto& [section, value] : base.items()) {
    if (!value.is_object()) continue;
    for (const auto& [key, v] : value.items()) {
      if (!j[section].contains(key)) j[section][key] = v;
    }
  }

  RunConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("paths");
    c.paths = {p.at("reviews").get<std::string>(),   p.at("reviewers").get<std::string>(),
               p.at("manifest").get<std::string>(),  p.at("lexicon").get<std::string>(),
               p.at("stopwords").get<std::string>(), p.at("checkpoint").get<std::string>(),
               p.at("pretrained_model").get<std::string>()};
    const auto& e = j.at("encoder");
    c.encoder.backend = e.at("backend").get<std::string>();
    c.encoder.text_dim = e.at("text_dim").get<std::size_t>();
    c.encoder.embedding_dim = e.at("embedding_dim").get<std::size_t>();
    c.encoder.hash_seed = e.at("hash_seed").get<std::uint64_t>();
    c.encoder.lowercase = e.at("lowercase").get<bool>();
    c.encoder.vocab_min_count = e.at("vocab_min_count").get<std::size_t>();
    c.encoder.vocab_max_size = e.at("vocab_max_size").get<std::size_t>();
    c.model = ModelConfig::from_json(j.at("model"));
    c.train = TrainConfig::from_json(j.at("train"));
    c.train.seed = c.seed;
    const auto& s = j.at("split");
    c.split.ratios = {s.at("train").get<double>(), s.at("valid").get<double>(), s.at("test").get<double>()};
    c.split.group_by_reviewer = s.at("group_by_reviewer").get<bool>();
    c.split.reference_date = optional_from<std::string>(s.at("reference_date"));
    const auto& a = j.at("analysis");
    c.analysis.top_k = a.at("top_k").get<std::size_t>();
    c.analysis.min_freq = a.at("min_freq").get<std::size_t>();
    c.analysis.sample_per_class = optional_from<std::size_t>(a.at("sample_per_class"));
    c.analysis.split = a.at("split").get<std::string>();
    const auto& x = j.at("explain");
    c.explain.steps = x.at("steps").get<std::size_t>();
    c.explain.top_k = x.at("top_k").get<std::size_t>();
    c.explain.count = x.at("count").get<std::size_t>();
    c.explain.split = x.at("split").get<std::string>();
    c.explain.review_ids = x.at("review_ids").get<std::vector<std::string>>();
    c.eval_split = j.at("eval").at("split").get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed run config: ") + ex.what());
  }
  if (c.encoder.backend != "test" && c.encoder.backend != "pretrained") {
    throw DataError("encoder.backend must be 'test' or 'pretrained', got '" + c.encoder.backend + "'");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace rhp
