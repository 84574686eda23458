#include "rhp/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "rhp/optimizer.hpp"

namespace rhp {

namespace {

// Per-example gradient buffers are only worth their memory for small models.
constexpr std::size_t kMaxBufferedGradientValues = std::size_t{1} << 24;

constexpr std::uint64_t kShuffleStream = 0x5A0FF1E000000000ULL;
constexpr std::uint64_t kDropoutStream = 0xD209000000000000ULL;

std::string exec_name(Exec e) { return e == Exec::serial ? "serial" : "parallel"; }

Exec exec_from_name(const std::string& s) {
  if (s == "serial") return Exec::serial;
  if (s == "parallel") return Exec::parallel;
  throw DataError("exec must be 'serial' or 'parallel', got '" + s + "'");
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0) throw DataError("epochs must be positive: nothing would be trained");
  if (batch_size == 0) throw DataError("batch_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw DataError("learning_rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw DataError("dropout must be in [0, 1)");
  if (clip_norm < 0.0) throw DataError("clip_norm must be non-negative");
  if (weight_decay < 0.0) throw DataError("weight_decay must be non-negative");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate}, {"batch_size", batch_size}, {"epochs", epochs},
          {"seed", seed},                   {"beta1", beta1},           {"beta2", beta2},
          {"epsilon", epsilon},             {"weight_decay", weight_decay}, {"dropout", dropout},
          {"clip_norm", clip_norm},         {"freeze_encoder", freeze_encoder}, {"exec", exec_name(exec)}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.dropout = j.value("dropout", c.dropout);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.freeze_encoder = j.value("freeze_encoder", c.freeze_encoder);
    c.exec = exec_from_name(j.value("exec", exec_name(c.exec)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed training config: ") + e.what());
  }
  return c;
}

nlohmann::json TrainLog::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"valid_loss", e.valid_loss},
                    {"valid_accuracy", e.valid_accuracy}});
  }
  return {{"epochs", rows}, {"best_epoch", best_epoch}};
}

std::string TrainLog::to_jsonl() const {
  std::string out;
  const auto j = to_json();
  for (const auto& row : j.at("epochs")) {
    auto r = row;
    r["best"] = r.at("epoch").get<std::size_t>() == best_epoch;
    out += r.dump() + "\n";
  }
  return out;
}

double mean_loss(const FusionModel& model, std::span<const LabeledExample> examples, Exec exec) {
  if (examples.empty()) throw DataError("cannot compute the loss of an empty split");
  const auto preds = model.predict_all(examples, exec);
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) total += cross_entropy(preds[i].probs, examples[i].label);
  return total / static_cast<double>(examples.size());
}

double batch_gradient(const FusionModel& model, std::span<const LabeledExample> batch, Gradients& grads, Exec exec,
                      double dropout, std::uint64_t dropout_seed) {
  const auto& params = model.parameters();
  const std::size_t n = batch.size();
  if (n == 0) throw DataError("empty batch");
  double loss = 0.0;
  const bool buffered =
      exec == Exec::parallel && n > 1 && n * params.trainable_size() <= kMaxBufferedGradientValues;
  if (buffered) {
    std::vector<Gradients> per(n, Gradients(params));
    std::vector<double> losses(n);
    kernels::for_each_index(exec, n, [&](std::size_t i) {
      losses[i] = model.loss_and_gradient(batch[i], per[i], Exec::serial, dropout, derive_seed(dropout_seed, i));
    });
    for (std::size_t i = 0; i < n; ++i) {
      grads.add(per[i]);
      loss += losses[i];
    }
  } else {
    Gradients local(params);
    for (std::size_t i = 0; i < n; ++i) {
      local.zero();
      loss += model.loss_and_gradient(batch[i], local, exec, dropout, derive_seed(dropout_seed, i));
      grads.add(local);
    }
  }
  grads.scale(1.0 / static_cast<double>(n));
  return loss;
}

MetricsReport evaluate_model(const FusionModel& model, std::span<const LabeledExample> examples, Exec exec,
                             std::vector<Prediction>* predictions) {
  auto preds = model.predict_all(examples, exec);
  std::vector<HelpfulnessClass> p, g;
  p.reserve(preds.size());
  g.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    p.push_back(preds[i].predicted_class);
    g.push_back(examples[i].label);
  }
  if (predictions != nullptr) *predictions = std::move(preds);
  return evaluate(p, g);
}

TrainResult train(FusionModel model, std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> valid_set, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DataError("training split is empty");
  if (valid_set.empty()) throw DataError("validation split is empty");
  if (config.freeze_encoder) model.set_encoder_trainable(false);

  Adam adam(model.parameters(), {config.learning_rate, config.beta1, config.beta2, config.epsilon,
                                 config.weight_decay});
  TrainLog log;
  std::optional<FusionModel> best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t step = 0;

  std::vector<std::size_t> order(train_set.size());
  std::vector<LabeledExample> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(config.seed, kShuffleStream + epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);

      Gradients grads(model.parameters());
      double loss = 0.0;
      try {
        loss = batch_gradient(model, batch, grads, config.exec, config.dropout,
                              derive_seed(config.seed, kDropoutStream + step));
      } catch (const NumericalError& e) {
        throw DivergenceError(e.what(), model, epoch, step);
      }
      const double norm = std::sqrt(grads.squared_norm());
      if (!std::isfinite(loss) || !std::isfinite(norm)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                                  std::to_string(step) + " (non-finite loss or gradient)",
                              model, epoch, step);
      }
      if (config.clip_norm > 0.0 && norm > config.clip_norm) grads.scale(config.clip_norm / norm);
      adam.step(model.parameters(), grads);
      epoch_loss += loss;
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(train_set.size());
    std::vector<Prediction> preds;
    try {
      const auto report = evaluate_model(model, valid_set, config.exec, &preds);
      rec.valid_accuracy = report.accuracy;
    } catch (const NumericalError& e) {
      throw DivergenceError(e.what(), model, epoch, step);
    }
    double vl = 0.0;
    for (std::size_t i = 0; i < valid_set.size(); ++i) vl += cross_entropy(preds[i].probs, valid_set[i].label);
    rec.valid_loss = vl / static_cast<double>(valid_set.size());
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.valid_loss < best_loss) {
      best_loss = rec.valid_loss;
      best = model;
      log.best_epoch = epoch;
    }
  }
  if (!best) best = model;
  if (log.best_epoch == 0) log.best_epoch = 1;
  return {std::move(*best), std::move(log)};
}

std::vector<AblationVariant> ablation_variants() {
  return {{"RHP (full)", true, true},
          {"w/o Expertise", false, true},
          {"w/o Temporal", true, false},
          {"w/o Expertise + Temporal", false, false}};
}

std::vector<AblationRun> run_ablations(std::shared_ptr<TextEncoder> encoder, const ModelConfig& base,
                                       const Dataset& data, const TrainConfig& config, std::uint64_t model_seed,
                                       const std::function<void(const AblationVariant&, const EpochRecord&)>&
                                           on_epoch) {
  std::vector<AblationRun> runs;
  for (const auto& variant : ablation_variants()) {
    ModelConfig mc = base;
    mc.use_expertise = variant.use_expertise;
    mc.use_temporal = variant.use_temporal;
    FusionModel model(encoder, mc, model_seed);
    EpochCallback cb;
    if (on_epoch) cb = [&](const EpochRecord& r) { on_epoch(variant, r); };
    auto result = train(std::move(model), data.train, data.valid, config, cb);
    auto metrics = evaluate_model(result.model, data.test, config.exec);
    const std::size_t trainable = result.model.parameters().trainable_size();
    runs.push_back({variant, std::move(result), std::move(metrics), trainable});
  }
  return runs;
}

}  // namespace rhp
