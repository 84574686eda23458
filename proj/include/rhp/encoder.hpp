#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/common.hpp"
#include "rhp/kernels.hpp"
#include "rhp/tensor.hpp"
#include "rhp/tokenizer.hpp"

namespace rhp {

struct TextEmbedding {
  std::vector<double> vector;
  std::string source;
};

// Forward-pass state an encoder needs for its backward pass.
struct EncoderCache {
  virtual ~EncoderCache() = default;
};

// Maps a token sequence to the text representation x_h. Encoders are
// immutable once bound to a ParameterSet: all trainable state lives in the
// set (tensors named "encoder.*"), so one encoder instance can be shared by
// every copy of a model.
//
// The pipeline is split at the token-embedding matrix so attribution can
// differentiate with respect to it:
//   ids --embed--> E (tokens x embedding_dim) --forward--> x_h (output_dim)
class TextEncoder {
 public:
  explicit TextEncoder(WordPieceTokenizer tokenizer) : tokenizer_(std::move(tokenizer)) {}
  virtual ~TextEncoder() = default;

  // "test" or "pretrained".
  virtual std::string kind() const = 0;
  // Stable description of the architecture and vocabulary, stored in checkpoints.
  virtual std::string identity() const = 0;
  virtual std::size_t embedding_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual std::size_t max_positions() const { return SIZE_MAX; }

  // Adds this encoder's tensors to `params` and initializes them.
  virtual void init_parameters(ParameterSet& params, Rng& rng) = 0;
  // Resolves tensor indices in an already-populated set (checkpoint load).
  virtual void bind(const ParameterSet& params) = 0;
  // Indices of every tensor owned by the encoder.
  virtual std::vector<std::size_t> parameter_indices() const = 0;

  virtual Matrix embed(std::span<const int> ids, const ParameterSet& params) const = 0;
  // Embedding of the padding token, used as the attribution baseline.
  virtual std::vector<double> pad_embedding(const ParameterSet& params) const = 0;

  virtual std::vector<double> forward(const Matrix& embeddings, const ParameterSet& params,
                                      std::unique_ptr<EncoderCache>* cache, Exec exec) const = 0;

  // Backpropagates d(x_h). Parameter gradients go to `grads` (tensors with
  // empty buffers are skipped); the gradient w.r.t. the token embeddings goes
  // to `d_embeddings` when non-null.
  virtual void backward(const EncoderCache& cache, std::span<const double> d_output,
                        const ParameterSet& params, Gradients* grads, Matrix* d_embeddings,
                        Exec exec) const = 0;

  // Scatters token-embedding gradients into a trainable embedding table.
  virtual void accumulate_embedding_gradient(std::span<const int> ids, const Matrix& d_embeddings,
                                             Gradients& grads) const;
  // Whether backward() must produce d_embeddings during training.
  virtual bool has_trainable_embeddings(const ParameterSet& params) const;

  // Architecture description written to checkpoints; make_encoder() inverts it.
  virtual nlohmann::json describe() const = 0;

  const WordPieceTokenizer& tokenizer() const { return tokenizer_; }

  // Throws DataError if any id is outside the vocabulary or the sequence is
  // longer than the encoder supports.
  void validate(const TokenizedReview& tokens) const;

  TextEmbedding encode(const TokenizedReview& tokens, const ParameterSet& params,
                       Exec exec = Exec::serial) const;

 protected:
  WordPieceTokenizer tokenizer_;
};

// Uniform [-1, 1) value of the hash embedding of (token id, dimension).
double hash_embedding_value(std::uint64_t seed, int token_id, std::size_t dim);

// Deterministic bag-of-subwords encoder: fixed hash-derived token embeddings
// (the [PAD] row is zero), mean pooled over the sequence, then a trainable
// projection and tanh:  x_h = tanh(W mean(E) + b).
class HashEncoder final : public TextEncoder {
 public:
  struct Options {
    std::size_t embedding_dim = 64;
    std::size_t output_dim = 128;
    std::uint64_t hash_seed = 0x5EED;
  };

  HashEncoder(WordPieceTokenizer tokenizer, Options options);

  std::string kind() const override { return "test"; }
  std::string identity() const override;
  std::size_t embedding_dim() const override { return options_.embedding_dim; }
  std::size_t output_dim() const override { return options_.output_dim; }

  void init_parameters(ParameterSet& params, Rng& rng) override;
  void bind(const ParameterSet& params) override;
  std::vector<std::size_t> parameter_indices() const override { return {weight_, bias_}; }

  Matrix embed(std::span<const int> ids, const ParameterSet& params) const override;
  std::vector<double> pad_embedding(const ParameterSet& params) const override;
  std::vector<double> forward(const Matrix& embeddings, const ParameterSet& params,
                              std::unique_ptr<EncoderCache>* cache, Exec exec) const override;
  void backward(const EncoderCache& cache, std::span<const double> d_output,
                const ParameterSet& params, Gradients* grads, Matrix* d_embeddings,
                Exec exec) const override;
  nlohmann::json describe() const override;

  const Options& options() const { return options_; }

 private:
  Options options_;
  Matrix table_;
  std::size_t weight_ = 0;
  std::size_t bias_ = 0;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization of a tensor.
void init_uniform_fan_in(std::span<double> values, std::size_t fan_in, Rng& rng);

// Rebuilds an encoder from its describe() output and shipped vocabulary.
std::shared_ptr<TextEncoder> make_encoder(const nlohmann::json& description, Vocabulary vocab);

}  // namespace rhp
