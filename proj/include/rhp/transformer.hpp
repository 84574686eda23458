#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rhp/encoder.hpp"

namespace rhp {

// BERT-style encoder hyperparameters (the subset of a Hugging Face
// config.json this implementation understands).
struct TransformerConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden_size = 768;
  std::size_t num_layers = 12;
  std::size_t num_heads = 12;
  std::size_t intermediate_size = 3072;
  std::size_t max_positions = 512;
  std::size_t type_vocab_size = 2;
  double layer_norm_eps = 1e-12;

  static TransformerConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Bidirectional transformer encoder with post-layer-norm blocks and exact
// GELU, followed by x_h = tanh(W h_[CLS] + b). Token embeddings (the
// attribution input) are the word-embedding rows; position and segment
// embeddings are added inside forward().
class TransformerEncoder final : public TextEncoder {
 public:
  TransformerEncoder(WordPieceTokenizer tokenizer, TransformerConfig config, std::size_t output_dim);

  // Loads config.json, vocab.txt and model.safetensors from a Hugging Face
  // style model directory. The weights are copied into the parameter set by
  // init_parameters(); the projection is freshly initialized.
  static std::shared_ptr<TransformerEncoder> from_pretrained(const std::filesystem::path& dir,
                                                             std::size_t output_dim, bool lowercase = true);

  // Weights keyed by Hugging Face names ("bert." prefix optional). Used by
  // init_parameters() instead of random initialization.
  void set_initial_weights(std::map<std::string, Tensor> weights);

  std::string kind() const override { return "pretrained"; }
  std::string identity() const override;
  std::size_t embedding_dim() const override { return config_.hidden_size; }
  std::size_t output_dim() const override { return output_dim_; }
  std::size_t max_positions() const override { return config_.max_positions; }

  void init_parameters(ParameterSet& params, Rng& rng) override;
  void bind(const ParameterSet& params) override;
  std::vector<std::size_t> parameter_indices() const override;

  Matrix embed(std::span<const int> ids, const ParameterSet& params) const override;
  std::vector<double> pad_embedding(const ParameterSet& params) const override;
  std::vector<double> forward(const Matrix& embeddings, const ParameterSet& params,
                              std::unique_ptr<EncoderCache>* cache, Exec exec) const override;
  void backward(const EncoderCache& cache, std::span<const double> d_output,
                const ParameterSet& params, Gradients* grads, Matrix* d_embeddings,
                Exec exec) const override;
  void accumulate_embedding_gradient(std::span<const int> ids, const Matrix& d_embeddings,
                                     Gradients& grads) const override;
  bool has_trainable_embeddings(const ParameterSet& params) const override;
  nlohmann::json describe() const override;

  const TransformerConfig& config() const { return config_; }

 private:
  struct Layer {
    std::size_t q_w, q_b, k_w, k_b, v_w, v_b;
    std::size_t attn_out_w, attn_out_b, ln1_g, ln1_b;
    std::size_t inter_w, inter_b, out_w, out_b, ln2_g, ln2_b;
  };

  std::vector<std::pair<std::string, std::vector<std::size_t>>> tensor_layout() const;
  void resolve(const ParameterSet& params);

  TransformerConfig config_;
  std::size_t output_dim_;
  std::shared_ptr<std::map<std::string, Tensor>> initial_weights_;

  std::size_t word_, position_, token_type_, ln0_g_, ln0_b_, proj_w_, proj_b_;
  std::vector<Layer> layers_;
};

}  // namespace rhp
