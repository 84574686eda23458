#include "rhp/model.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace rhp {

nlohmann::json ModelConfig::to_json() const {
  return {{"use_expertise", use_expertise},
          {"use_temporal", use_temporal},
          {"expertise_dim", expertise_dim},
          {"temporal_dim", temporal_dim},
          {"max_len", max_len}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.use_expertise = j.value("use_expertise", c.use_expertise);
  c.use_temporal = j.value("use_temporal", c.use_temporal);
  c.expertise_dim = j.value("expertise_dim", c.expertise_dim);
  c.temporal_dim = j.value("temporal_dim", c.temporal_dim);
  c.max_len = j.value("max_len", c.max_len);
  if (c.expertise_dim == 0 || c.temporal_dim == 0) throw DataError("head widths must be positive");
  if (c.max_len < 2) throw DataError("max_len must be at least 2");
  return c;
}

ClassProbabilities softmax(std::span<const double> logits) {
  if (logits.size() != kNumClasses) throw DataError("expected one logit per class");
  ClassProbabilities p{};
  std::copy(logits.begin(), logits.end(), p.begin());
  kernels::softmax_inplace(p);
  return p;
}

double cross_entropy(std::span<const double> probs, HelpfulnessClass label) {
  if (!is_valid_class(label)) throw DomainError("label outside 1..5: " + std::to_string(label));
  if (probs.size() != kNumClasses) throw DataError("expected one probability per class");
  double p = probs[static_cast<std::size_t>(label - 1)];
  if (p < kProbabilityFloor) {
    spdlog::warn("probability of the gold class {} is {:.3g}; clamped to {:.0e}", label, p, kProbabilityFloor);
    p = kProbabilityFloor;
  }
  return -std::log(p);
}

HelpfulnessClass predict_class(std::span<const double> probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<HelpfulnessClass>(best + 1);
}

FusionModel::FusionModel(std::shared_ptr<TextEncoder> encoder, ModelConfig config, std::uint64_t seed)
    : encoder_(std::move(encoder)), config_(config) {
  Rng enc_rng(derive_seed(seed, 1));
  encoder_->init_parameters(params_, enc_rng);
  if (config_.use_expertise) {
    Rng rng(derive_seed(seed, 2));
    const auto w = params_.add("expertise.weight", {config_.expertise_dim, 1});
    const auto b = params_.add("expertise.bias", {config_.expertise_dim});
    init_uniform_fan_in(params_.values(w), 1, rng);
    init_uniform_fan_in(params_.values(b), 1, rng);
  }
  if (config_.use_temporal) {
    Rng rng(derive_seed(seed, 3));
    const auto w = params_.add("temporal.weight", {config_.temporal_dim, 1});
    const auto b = params_.add("temporal.bias", {config_.temporal_dim});
    init_uniform_fan_in(params_.values(w), 1, rng);
    init_uniform_fan_in(params_.values(b), 1, rng);
  }
  Rng rng(derive_seed(seed, 4));
  const std::size_t d = fusion_dim();
  const auto w = params_.add("classifier.weight", {static_cast<std::size_t>(kNumClasses), d});
  const auto b = params_.add("classifier.bias", {static_cast<std::size_t>(kNumClasses)});
  init_uniform_fan_in(params_.values(w), d, rng);
  init_uniform_fan_in(params_.values(b), d, rng);
  resolve();
}

FusionModel::FusionModel(std::shared_ptr<TextEncoder> encoder, ModelConfig config, ParameterSet params)
    : encoder_(std::move(encoder)), config_(config), params_(std::move(params)) {
  encoder_->bind(params_);
  if (config_.use_expertise != params_.contains("expertise.weight") ||
      config_.use_temporal != params_.contains("temporal.weight")) {
    throw DataError("parameter set does not match the model's ablation flags");
  }
  resolve();
  const auto& shape = params_.shape(cls_w_);
  if (shape != std::vector<std::size_t>{static_cast<std::size_t>(kNumClasses), fusion_dim()}) {
    throw DataError("classifier.weight has the wrong shape for this model");
  }
}

void FusionModel::resolve() {
  if (config_.use_expertise) {
    exp_w_ = params_.index_of("expertise.weight");
    exp_b_ = params_.index_of("expertise.bias");
    config_.expertise_dim = params_.shape(exp_w_)[0];
  }
  if (config_.use_temporal) {
    tmp_w_ = params_.index_of("temporal.weight");
    tmp_b_ = params_.index_of("temporal.bias");
    config_.temporal_dim = params_.shape(tmp_w_)[0];
  }
  cls_w_ = params_.index_of("classifier.weight");
  cls_b_ = params_.index_of("classifier.bias");
  encoder_indices_ = encoder_->parameter_indices();
}

std::size_t FusionModel::fusion_dim() const {
  return encoder_->output_dim() + (config_.use_expertise ? config_.expertise_dim : 0) +
         (config_.use_temporal ? config_.temporal_dim : 0);
}

void FusionModel::set_encoder_trainable(bool trainable) {
  for (auto i : encoder_indices_) params_.set_trainable(i, trainable);
}

namespace {

std::vector<double> scalar_head(std::span<const double> w, std::span<const double> b, double x) {
  std::vector<double> h(w.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::tanh(w[i] * x + b[i]);
  return h;
}

void scalar_head_backward(std::span<const double> h, std::span<const double> dh, double x,
                          std::span<double> dw, std::span<double> db) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dz = dh[i] * (1.0 - h[i] * h[i]);
    dw[i] += dz * x;
    db[i] += dz;
  }
}

}  // namespace

std::vector<double> FusionModel::logits(const Matrix& embeddings, double expertise, double age,
                                        ForwardState* state, Exec exec, double dropout_rate,
                                        std::uint64_t dropout_seed) const {
  ForwardState local;
  ForwardState& st = state != nullptr ? *state : local;
  st.x_h = encoder_->forward(embeddings, params_, state != nullptr ? &st.encoder_cache : nullptr, exec);
  st.h_s.clear();
  st.h_t.clear();
  if (config_.use_expertise) st.h_s = scalar_head(params_.values(exp_w_), params_.values(exp_b_), expertise);
  if (config_.use_temporal) st.h_t = scalar_head(params_.values(tmp_w_), params_.values(tmp_b_), age);

  st.fused.clear();
  st.fused.reserve(fusion_dim());
  st.fused.insert(st.fused.end(), st.h_s.begin(), st.h_s.end());
  st.fused.insert(st.fused.end(), st.x_h.begin(), st.x_h.end());
  st.fused.insert(st.fused.end(), st.h_t.begin(), st.h_t.end());

  st.dropout.clear();
  if (dropout_rate > 0.0) {
    Rng rng(dropout_seed);
    const double keep = 1.0 - dropout_rate;
    st.dropout.resize(st.fused.size());
    for (std::size_t i = 0; i < st.fused.size(); ++i) {
      st.dropout[i] = rng.uniform() < dropout_rate ? 0.0 : 1.0 / keep;
      st.fused[i] *= st.dropout[i];
    }
  }

  st.logits.assign(kNumClasses, 0.0);
  kernels::affine(params_.values(cls_w_), params_.values(cls_b_), st.fused, st.logits);
  for (double v : st.logits) {
    if (!std::isfinite(v)) {
      const std::string bad = params_.first_non_finite();
      throw NumericalError("non-finite logit in forward pass; " +
                           (bad.empty() ? std::string("all parameters are finite (input overflow?)")
                                        : "first non-finite parameter tensor: " + bad));
    }
  }
  st.probs = softmax(st.logits);
  return st.logits;
}

Prediction FusionModel::predict(const LabeledExample& example, Exec exec) const {
  encoder_->validate(example.tokens);
  const Matrix emb = encoder_->embed(example.tokens.ids, params_);
  ForwardState st;
  logits(emb, example.expertise_norm, example.age_norm, &st, exec);
  return {st.probs, predict_class(st.probs)};
}

std::vector<Prediction> FusionModel::predict_all(std::span<const LabeledExample> examples, Exec exec) const {
  std::vector<Prediction> out(examples.size());
  // Examples run concurrently; each forward pass itself stays serial.
  kernels::for_each_index(exec, examples.size(),
                          [&](std::size_t i) { out[i] = predict(examples[i], Exec::serial); });
  return out;
}

void FusionModel::backward(const ForwardState& st, std::span<const double> d_logits, double expertise,
                           double age, Gradients* grads, Matrix* d_embeddings, Exec exec) const {
  const std::size_t d = st.fused.size();
  std::vector<double> d_fused(d);
  std::span<double> dw, db;
  if (grads != nullptr && grads->has(cls_w_)) {
    dw = (*grads)[cls_w_];
    db = (*grads)[cls_b_];
  }
  kernels::affine_backward(params_.values(cls_w_), st.fused, d_logits, dw, db, d_fused);
  if (!st.dropout.empty()) {
    for (std::size_t i = 0; i < d; ++i) d_fused[i] *= st.dropout[i];
  }

  const std::size_t ks = st.h_s.size();
  const std::size_t kx = st.x_h.size();
  const std::span<const double> dfs(d_fused);
  if (config_.use_expertise && grads != nullptr && grads->has(exp_w_)) {
    scalar_head_backward(st.h_s, dfs.subspan(0, ks), expertise, (*grads)[exp_w_], (*grads)[exp_b_]);
  }
  if (config_.use_temporal && grads != nullptr && grads->has(tmp_w_)) {
    scalar_head_backward(st.h_t, dfs.subspan(ks + kx), age, (*grads)[tmp_w_], (*grads)[tmp_b_]);
  }

  bool encoder_grads = false;
  if (grads != nullptr) {
    for (auto i : encoder_indices_) encoder_grads = encoder_grads || grads->has(i);
  }
  if (encoder_grads || d_embeddings != nullptr) {
    encoder_->backward(*st.encoder_cache, dfs.subspan(ks, kx), params_, grads, d_embeddings, exec);
  }
}

double FusionModel::loss_and_gradient(const LabeledExample& example, Gradients& grads, Exec exec,
                                      double dropout_rate, std::uint64_t dropout_seed) const {
  encoder_->validate(example.tokens);
  const Matrix emb = encoder_->embed(example.tokens.ids, params_);
  ForwardState st;
  logits(emb, example.expertise_norm, example.age_norm, &st, exec, dropout_rate, dropout_seed);
  const double loss = cross_entropy(st.probs, example.label);

  std::vector<double> d_logits(st.probs.begin(), st.probs.end());
  d_logits[static_cast<std::size_t>(example.label - 1)] -= 1.0;

  const bool scatter = encoder_->has_trainable_embeddings(params_);
  Matrix d_emb;
  backward(st, d_logits, example.expertise_norm, example.age_norm, &grads, scatter ? &d_emb : nullptr, exec);
  if (scatter) encoder_->accumulate_embedding_gradient(example.tokens.ids, d_emb, grads);
  return loss;
}

double FusionModel::logit_and_embedding_gradient(const Matrix& embeddings, double expertise, double age,
                                                 int target_class, Matrix* d_embeddings, Exec exec) const {
  if (!is_valid_class(target_class)) throw DomainError("target class outside 1..5");
  ForwardState st;
  logits(embeddings, expertise, age, &st, exec);
  const double value = st.logits[static_cast<std::size_t>(target_class - 1)];
  if (d_embeddings != nullptr) {
    std::vector<double> d_logits(kNumClasses, 0.0);
    d_logits[static_cast<std::size_t>(target_class - 1)] = 1.0;
    backward(st, d_logits, expertise, age, nullptr, d_embeddings, exec);
  }
  return value;
}

}  // namespace rhp
