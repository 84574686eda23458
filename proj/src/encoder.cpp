#include "rhp/encoder.hpp"

#include <cmath>

#include "rhp/transformer.hpp"

namespace rhp {

namespace {

struct HashCache final : EncoderCache {
  std::vector<double> pooled;
  std::vector<double> output;
  std::size_t length = 0;
};

std::string vocab_fingerprint(const Vocabulary& vocab) {
  std::string joined;
  for (const auto& t : vocab.tokens()) {
    joined += t;
    joined.push_back('\n');
  }
  return hex64(fnv1a64(joined));
}

}  // namespace

void init_uniform_fan_in(std::span<double> values, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  for (double& v : values) v = rng.uniform(-bound, bound);
}

void TextEncoder::accumulate_embedding_gradient(std::span<const int>, const Matrix&, Gradients&) const {}

bool TextEncoder::has_trainable_embeddings(const ParameterSet&) const { return false; }

void TextEncoder::validate(const TokenizedReview& tokens) const {
  const auto& vocab = tokenizer_.vocabulary();
  for (int id : tokens.ids) {
    if (!vocab.contains_id(id)) {
      throw DataError("token id " + std::to_string(id) + " is outside the encoder vocabulary of size " +
                      std::to_string(vocab.size()) + " (tokenizer/encoder mismatch)");
    }
  }
  if (tokens.ids.empty()) throw DataError("empty token sequence");
  if (tokens.ids.size() > max_positions()) {
    throw DataError("token sequence of length " + std::to_string(tokens.ids.size()) +
                    " exceeds encoder position limit " + std::to_string(max_positions()));
  }
}

TextEmbedding TextEncoder::encode(const TokenizedReview& tokens, const ParameterSet& params,
                                  Exec exec) const {
  validate(tokens);
  const Matrix emb = embed(tokens.ids, params);
  return {forward(emb, params, nullptr, exec), identity()};
}

double hash_embedding_value(std::uint64_t seed, int token_id, std::size_t dim) {
  const std::uint64_t key =
      seed ^ ((static_cast<std::uint64_t>(static_cast<std::uint32_t>(token_id)) << 32) |
              static_cast<std::uint64_t>(dim & 0xFFFFFFFFu));
  const std::uint64_t z = splitmix64(key);
  return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

HashEncoder::HashEncoder(WordPieceTokenizer tokenizer, Options options)
    : TextEncoder(std::move(tokenizer)), options_(options) {
  if (options_.embedding_dim == 0 || options_.output_dim == 0) {
    throw DataError("hash encoder dimensions must be positive");
  }
  const auto& vocab = tokenizer_.vocabulary();
  table_ = Matrix(vocab.size(), options_.embedding_dim);
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    if (static_cast<int>(id) == vocab.pad_id()) continue;
    for (std::size_t j = 0; j < options_.embedding_dim; ++j) {
      table_(id, j) = hash_embedding_value(options_.hash_seed, static_cast<int>(id), j);
    }
  }
}

std::string HashEncoder::identity() const {
  return "hash-bag-v1:e" + std::to_string(options_.embedding_dim) + ":k" +
         std::to_string(options_.output_dim) + ":s" + hex64(options_.hash_seed) + ":v" +
         vocab_fingerprint(tokenizer_.vocabulary());
}

void HashEncoder::init_parameters(ParameterSet& params, Rng& rng) {
  weight_ = params.add("encoder.projection.weight", {options_.output_dim, options_.embedding_dim});
  bias_ = params.add("encoder.projection.bias", {options_.output_dim});
  init_uniform_fan_in(params.values(weight_), options_.embedding_dim, rng);
  init_uniform_fan_in(params.values(bias_), options_.embedding_dim, rng);
}

void HashEncoder::bind(const ParameterSet& params) {
  weight_ = params.index_of("encoder.projection.weight");
  bias_ = params.index_of("encoder.projection.bias");
  if (params.shape(weight_) != std::vector<std::size_t>{options_.output_dim, options_.embedding_dim}) {
    throw DataError("encoder.projection.weight has the wrong shape");
  }
}

Matrix HashEncoder::embed(std::span<const int> ids, const ParameterSet&) const {
  Matrix out(ids.size(), options_.embedding_dim);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto src = table_.row(static_cast<std::size_t>(ids[t]));
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

std::vector<double> HashEncoder::pad_embedding(const ParameterSet&) const {
  return std::vector<double>(options_.embedding_dim, 0.0);
}

std::vector<double> HashEncoder::forward(const Matrix& embeddings, const ParameterSet& params,
                                         std::unique_ptr<EncoderCache>* cache, Exec) const {
  const std::size_t len = embeddings.rows();
  std::vector<double> pooled(options_.embedding_dim, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    const auto row = embeddings.row(t);
    for (std::size_t j = 0; j < pooled.size(); ++j) pooled[j] += row[j];
  }
  const double inv = len == 0 ? 0.0 : 1.0 / static_cast<double>(len);
  for (double& v : pooled) v *= inv;

  std::vector<double> out(options_.output_dim);
  kernels::affine(params.values(weight_), params.values(bias_), pooled, out);
  for (double& v : out) v = std::tanh(v);

  if (cache != nullptr) {
    auto c = std::make_unique<HashCache>();
    c->pooled = std::move(pooled);
    c->output = out;
    c->length = len;
    *cache = std::move(c);
  }
  return out;
}

void HashEncoder::backward(const EncoderCache& cache_base, std::span<const double> d_output,
                           const ParameterSet& params, Gradients* grads, Matrix* d_embeddings,
                           Exec) const {
  const auto& cache = dynamic_cast<const HashCache&>(cache_base);
  std::vector<double> dz(options_.output_dim);
  for (std::size_t i = 0; i < dz.size(); ++i) {
    dz[i] = d_output[i] * (1.0 - cache.output[i] * cache.output[i]);
  }
  std::span<double> dw, db;
  if (grads != nullptr && grads->has(weight_)) {
    dw = (*grads)[weight_];
    db = (*grads)[bias_];
  }
  std::vector<double> d_pooled;
  if (d_embeddings != nullptr) d_pooled.resize(options_.embedding_dim);
  kernels::affine_backward(params.values(weight_), cache.pooled, dz, dw, db, d_pooled);
  if (d_embeddings != nullptr) {
    *d_embeddings = Matrix(cache.length, options_.embedding_dim);
    const double inv = cache.length == 0 ? 0.0 : 1.0 / static_cast<double>(cache.length);
    for (std::size_t t = 0; t < cache.length; ++t) {
      auto row = d_embeddings->row(t);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = d_pooled[j] * inv;
    }
  }
}

nlohmann::json HashEncoder::describe() const {
  return {{"kind", kind()},
          {"embedding_dim", options_.embedding_dim},
          {"output_dim", options_.output_dim},
          {"hash_seed", options_.hash_seed},
          {"lowercase", tokenizer_.lowercase()}};
}

std::shared_ptr<TextEncoder> make_encoder(const nlohmann::json& description, Vocabulary vocab) {
  try {
    const std::string kind = description.at("kind").get<std::string>();
    WordPieceTokenizer tokenizer(std::move(vocab), description.at("lowercase").get<bool>());
    if (kind == "test") {
      HashEncoder::Options o;
      o.embedding_dim = description.at("embedding_dim").get<std::size_t>();
      o.output_dim = description.at("output_dim").get<std::size_t>();
      o.hash_seed = description.at("hash_seed").get<std::uint64_t>();
      return std::make_shared<HashEncoder>(std::move(tokenizer), o);
    }
    if (kind == "pretrained") {
      const auto config = TransformerConfig::from_json(description.at("architecture"));
      return std::make_shared<TransformerEncoder>(std::move(tokenizer), config,
                                                  description.at("output_dim").get<std::size_t>());
    }
    throw DataError("unknown encoder kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed encoder description: ") + e.what());
  }
}

}  // namespace rhp
