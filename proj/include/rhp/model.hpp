#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/common.hpp"
#include "rhp/encoder.hpp"
#include "rhp/kernels.hpp"
#include "rhp/tensor.hpp"
#include "rhp/tokenizer.hpp"

namespace rhp {

// Raised when a forward pass produces NaN/Inf. The message names the first
// non-finite parameter tensor, if any.
class NumericalError : public Error {
 public:
  using Error::Error;
};

struct ModelConfig {
  bool use_expertise = true;
  bool use_temporal = true;
  std::size_t expertise_dim = 16;
  std::size_t temporal_dim = 16;
  std::size_t max_len = 512;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

using ClassProbabilities = std::array<double, kNumClasses>;

struct Prediction {
  ClassProbabilities probs{};
  HelpfulnessClass predicted_class = 1;
};

ClassProbabilities softmax(std::span<const double> logits);

// -log probs[label - 1], with the probability clamped below at 1e-12 (a
// warning is logged when the clamp engages).
double cross_entropy(std::span<const double> probs, HelpfulnessClass label);

// Argmax + 1; ties resolve to the lowest class.
HelpfulnessClass predict_class(std::span<const double> probs);

inline constexpr double kProbabilityFloor = 1e-12;

struct LabeledExample {
  std::string review_id;
  TokenizedReview tokens;
  double expertise_norm = 0.0;
  double age_norm = 0.0;
  HelpfulnessClass label = 1;
};

// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardState {
  std::unique_ptr<EncoderCache> encoder_cache;
  std::vector<double> h_s, x_h, h_t;
  std::vector<double> fused;    // o_final after dropout
  std::vector<double> dropout;  // per-unit scale (0 or 1/keep); empty when off
  std::vector<double> logits;
  ClassProbabilities probs{};
};

// Expertise head, text encoder, temporal head and the classifier over
// o_final = [h_s, x_h, h_t] (disabled parts omitted). Disabled heads have no
// tensors at all. The encoder object is shared between copies; every
// trainable value lives in the ParameterSet.
class FusionModel {
 public:
  // Builds and initializes a fresh model. Each component draws from its own
  // derived seed stream so ablation variants share encoder and classifier
  // initialization streams.
  FusionModel(std::shared_ptr<TextEncoder> encoder, ModelConfig config, std::uint64_t seed);
  // Wraps existing parameters (checkpoint load).
  FusionModel(std::shared_ptr<TextEncoder> encoder, ModelConfig config, ParameterSet params);

  const ModelConfig& config() const { return config_; }
  const TextEncoder& encoder() const { return *encoder_; }
  std::shared_ptr<TextEncoder> shared_encoder() const { return encoder_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }

  std::size_t fusion_dim() const;
  void set_encoder_trainable(bool trainable);

  // Logits for a token-embedding matrix and the two normalized scalars.
  // `dropout_rate` > 0 applies inverted dropout to o_final using `dropout_seed`.
  std::vector<double> logits(const Matrix& embeddings, double expertise, double age, ForwardState* state,
                             Exec exec, double dropout_rate = 0.0, std::uint64_t dropout_seed = 0) const;

  Prediction predict(const LabeledExample& example, Exec exec = Exec::serial) const;
  std::vector<Prediction> predict_all(std::span<const LabeledExample> examples, Exec exec) const;

  // Adds d loss / d params for one example into `grads` and returns the loss.
  double loss_and_gradient(const LabeledExample& example, Gradients& grads, Exec exec,
                           double dropout_rate = 0.0, std::uint64_t dropout_seed = 0) const;

  // Target-class logit and its gradient w.r.t. the token embeddings, with
  // the scalar features held fixed. Used for attribution.
  double logit_and_embedding_gradient(const Matrix& embeddings, double expertise, double age, int target_class,
                                      Matrix* d_embeddings, Exec exec) const;

  // Backpropagates d(logits) through the classifier, heads and encoder.
  void backward(const ForwardState& state, std::span<const double> d_logits, double expertise, double age,
                Gradients* grads, Matrix* d_embeddings, Exec exec) const;

 private:
  void resolve();

  std::shared_ptr<TextEncoder> encoder_;
  ModelConfig config_;
  ParameterSet params_;
  std::size_t exp_w_ = 0, exp_b_ = 0, tmp_w_ = 0, tmp_b_ = 0, cls_w_ = 0, cls_b_ = 0;
  std::vector<std::size_t> encoder_indices_;
};

}  // namespace rhp
