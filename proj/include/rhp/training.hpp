#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/dataset.hpp"
#include "rhp/evaluation.hpp"
#include "rhp/kernels.hpp"
#include "rhp/model.hpp"

namespace rhp {

struct TrainConfig {
  double learning_rate = 3e-5;
  std::size_t batch_size = 32;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  double dropout = 0.0;
  // Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
  bool freeze_encoder = false;
  Exec exec = Exec::parallel;

  // Throws DataError for non-positive or out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double valid_accuracy = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based, argmin of validation loss, earliest on ties

  nlohmann::json to_json() const;
  // One JSON object per epoch, newline separated.
  std::string to_jsonl() const;
};

struct TrainResult {
  FusionModel model;  // parameters of the best epoch
  TrainLog log;
};

// Training produced a non-finite loss or parameter. Carries the last state
// whose parameters were all finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, FusionModel last_finite, std::size_t epoch, std::size_t step)
      : Error(what), last_finite_(std::move(last_finite)), epoch_(epoch), step_(step) {}

  const FusionModel& last_finite() const { return last_finite_; }
  std::size_t epoch() const { return epoch_; }
  std::size_t step() const { return step_; }

 private:
  FusionModel last_finite_;
  std::size_t epoch_;
  std::size_t step_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mean cross-entropy over examples (inference mode).
double mean_loss(const FusionModel& model, std::span<const LabeledExample> examples, Exec exec);

// Summed gradient of the batch loss (mean over the batch) and the summed
// per-example loss. The parallel path computes per-example gradients
// concurrently and reduces them in batch order, matching the serial result
// bit for bit.
double batch_gradient(const FusionModel& model, std::span<const LabeledExample> batch, Gradients& grads, Exec exec,
                      double dropout = 0.0, std::uint64_t dropout_seed = 0);

TrainResult train(FusionModel model, std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> valid_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct AblationVariant {
  std::string name;
  bool use_expertise = true;
  bool use_temporal = true;
};

// Full model, w/o Expertise, w/o Temporal, w/o Expertise + Temporal.
std::vector<AblationVariant> ablation_variants();

struct AblationRun {
  AblationVariant variant;
  TrainResult result;
  MetricsReport test_metrics;
  std::size_t trainable_parameters = 0;
};

// Trains every variant with the same seeds and data order and evaluates
// each on the test split.
std::vector<AblationRun> run_ablations(std::shared_ptr<TextEncoder> encoder, const ModelConfig& base,
                                       const Dataset& data, const TrainConfig& config, std::uint64_t model_seed,
                                       const std::function<void(const AblationVariant&, const EpochRecord&)>&
                                           on_epoch = {});

MetricsReport evaluate_model(const FusionModel& model, std::span<const LabeledExample> examples, Exec exec,
                             std::vector<Prediction>* predictions = nullptr);

}  // namespace rhp
