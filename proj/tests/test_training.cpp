#include <cmath>

#include <gtest/gtest.h>

#include "rhp/checkpoint.hpp"
#include "rhp/dataset.hpp"
#include "rhp/optimizer.hpp"
#include "rhp/synthetic.hpp"
#include "rhp/training.hpp"
#include "test_util.hpp"

namespace rhp {
namespace {

using testing::random_example;

std::vector<LabeledExample> random_set(const TextEncoder& enc, std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_example(enc, rng));
  return out;
}

TrainConfig quick_config() {
  TrainConfig c;
  c.learning_rate = 1e-2;
  c.batch_size = 8;
  c.epochs = 3;
  c.seed = 4;
  return c;
}

TEST(TrainConfig, ZeroEpochsIsAnError) {
  auto enc = testing::small_hash_encoder();
  const auto data = random_set(*enc, 1, 8);
  auto c = quick_config();
  c.epochs = 0;
  EXPECT_THROW(train(FusionModel(enc, {}, 1), data, data, c), DataError);
}

TEST(TrainConfig, JsonRoundTrip) {
  auto c = quick_config();
  c.exec = Exec::serial;
  c.dropout = 0.1;
  const auto back = TrainConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParameterSet p;
  const auto i = p.add("w", {3});
  p.values(i)[0] = 1.0;
  p.values(i)[1] = -2.0;
  p.values(i)[2] = 0.5;
  Gradients g(p);
  g[i][0] = 3.0;
  g[i][1] = -0.01;
  g[i][2] = 0.0;
  AdamOptions o;
  o.learning_rate = 0.1;
  Adam adam(p, o);
  adam.step(p, g);
  EXPECT_NEAR(p.values(i)[0], 0.9, 1e-7);
  EXPECT_NEAR(p.values(i)[1], -1.9, 1e-5);
  EXPECT_EQ(p.values(i)[2], 0.5);
}

TEST(BatchGradient, ParallelMatchesSerialBitwise) {
  auto enc = testing::small_hash_encoder();
  FusionModel m(enc, {}, 2);
  const auto batch = random_set(*enc, 3, 37);
  Gradients a(m.parameters()), b(m.parameters());
  const double la = batch_gradient(m, batch, a, Exec::serial, 0.1, 99);
  const double lb = batch_gradient(m, batch, b, Exec::parallel, 0.1, 99);
  EXPECT_EQ(la, lb);
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (!a.has(t)) continue;
    for (std::size_t i = 0; i < a[t].size(); ++i) ASSERT_EQ(a[t][i], b[t][i]);
  }
}

TEST(BatchGradient, IsMeanOfExampleGradients) {
  auto enc = testing::small_hash_encoder();
  FusionModel m(enc, {}, 2);
  const auto batch = random_set(*enc, 5, 6);
  Gradients sum(m.parameters()), avg(m.parameters());
  double loss = 0;
  for (const auto& ex : batch) {
    Gradients g(m.parameters());
    loss += m.loss_and_gradient(ex, g, Exec::serial);
    sum.add(g);
  }
  const double l = batch_gradient(m, batch, avg, Exec::serial);
  EXPECT_NEAR(l, loss, 1e-12);
  const auto c = m.parameters().index_of("classifier.weight");
  for (std::size_t i = 0; i < avg[c].size(); ++i) EXPECT_NEAR(avg[c][i], sum[c][i] / 6, 1e-14);
}

TEST(Train, DeterministicAcrossRunsAndExecutionModes) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 7, 40), va = random_set(*enc, 8, 10);
  auto c = quick_config();
  c.dropout = 0.1;
  const auto a = train(FusionModel(enc, {}, 11), tr, va, c);
  const auto b = train(FusionModel(enc, {}, 11), tr, va, c);
  c.exec = Exec::serial;
  const auto s = train(FusionModel(enc, {}, 11), tr, va, c);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(a.model.parameters(), s.model.parameters());
  EXPECT_EQ(a.log.to_json(), s.log.to_json());
}

TEST(Train, BestEpochIsArgminOfValidationLoss) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 9, 32), va = random_set(*enc, 10, 12);
  auto c = quick_config();
  c.epochs = 6;
  c.learning_rate = 0.05;
  const auto r = train(FusionModel(enc, {}, 1), tr, va, c);
  ASSERT_EQ(r.log.epochs.size(), 6u);
  std::size_t best = 0;
  for (std::size_t e = 0; e < 6; ++e) {
    if (r.log.epochs[e].valid_loss < r.log.epochs[best].valid_loss) best = e;
  }
  EXPECT_EQ(r.log.best_epoch, best + 1);
  EXPECT_NEAR(mean_loss(r.model, va, Exec::serial), r.log.epochs[best].valid_loss, 1e-12);
}

TEST(Train, TiesGoToEarliestEpoch) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 9, 16), va = random_set(*enc, 10, 4);
  auto c = quick_config();
  c.learning_rate = 1e-300;
  c.epochs = 4;
  const auto r = train(FusionModel(enc, {}, 1), tr, va, c);
  EXPECT_EQ(r.log.best_epoch, 1u);
}

TEST(Train, DivergenceReportsLastFiniteState) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 12, 16), va = random_set(*enc, 13, 4);
  FusionModel m(enc, {}, 1);
  auto& p = m.parameters();
  p.values(p.index_of("classifier.weight"))[0] = 1e308;
  p.values(p.index_of("classifier.weight"))[1] = -1e308;
  auto c = quick_config();
  try {
    train(m, tr, va, c);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
    EXPECT_TRUE(e.last_finite().parameters().first_non_finite().empty());
  }
}

TEST(Train, FrozenEncoderKeepsProjection) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 14, 16), va = random_set(*enc, 15, 4);
  FusionModel m(enc, {}, 1);
  auto c = quick_config();
  c.freeze_encoder = true;
  const auto r = train(m, tr, va, c);
  const auto w = m.parameters().index_of("encoder.projection.weight");
  EXPECT_TRUE(std::equal(m.parameters().values(w).begin(), m.parameters().values(w).end(),
                         r.model.parameters().values(w).begin()));
}

TEST(Ablations, FourVariantsWithShrinkingParameterCounts) {
  SyntheticOptions so;
  so.reviews = 120;
  so.seed = 3;
  const auto synth = generate_synthetic(so);
  testing::TempDir dir("ablate");
  write_synthetic(synth, dir.path());
  const auto raw = load_corpus(dir / "reviews.jsonl", dir / "reviewers.jsonl");
  const auto labeled = make_splits(label_reviews(raw), {{0.6, 0.2, 0.2}, 1, false});
  auto vocab = Vocabulary::build(review_texts(raw, labeled.train), true, 2, 1000);
  auto enc = std::make_shared<HashEncoder>(WordPieceTokenizer(std::move(vocab), true), HashEncoder::Options{});
  const auto data = build_dataset(raw, labeled, enc->tokenizer(), 128);
  auto c = quick_config();
  c.epochs = 2;
  const auto runs = run_ablations(enc, {}, data, c, 5);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].variant.name, "RHP (full)");
  EXPECT_EQ(runs[3].variant.name, "w/o Expertise + Temporal");
  EXPECT_GT(runs[0].trainable_parameters, runs[1].trainable_parameters);
  EXPECT_EQ(runs[1].trainable_parameters, runs[2].trainable_parameters);
  EXPECT_GT(runs[2].trainable_parameters, runs[3].trainable_parameters);
  EXPECT_EQ(runs[3].result.model.fusion_dim(), 128u);
  for (const auto& r : runs) EXPECT_EQ(r.test_metrics.n, data.test.size());
}

TEST(Checkpoint, RoundTripPreservesPredictions) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 16, 16), va = random_set(*enc, 17, 6);
  const auto r = train(FusionModel(enc, {}, 1), tr, va, quick_config());
  testing::TempDir dir("ckpt");
  FeatureStats stats{{0, 10}, {0, 365}, {}};
  const nlohmann::json run{{"seed", 1}};
  save_checkpoint(dir / "ck", r.model, stats, run);
  const auto back = load_checkpoint(dir / "ck");
  EXPECT_EQ(back.model.parameters(), r.model.parameters());
  EXPECT_EQ(back.stats.age_days.max, 365);
  EXPECT_EQ(back.config_hash, config_hash(run));
  EXPECT_EQ(back.encoder_identity, enc->identity());
  for (const auto& ex : va) EXPECT_EQ(back.model.predict(ex).probs, r.model.predict(ex).probs);
}

TEST(Checkpoint, IdenticalRunsGiveIdenticalFiles) {
  auto enc = testing::small_hash_encoder();
  const auto tr = random_set(*enc, 18, 16), va = random_set(*enc, 19, 4);
  testing::TempDir dir("ckpt");
  for (const char* name : {"a", "b"}) {
    const auto r = train(FusionModel(enc, {}, 3), tr, va, quick_config());
    save_checkpoint(dir / name, r.model, {}, nlohmann::json::object());
  }
  for (const char* f : {"manifest.json", "parameters.bin", "vocab.txt"}) {
    EXPECT_EQ(testing::read_text(dir / "a" / f), testing::read_text(dir / "b" / f)) << f;
  }
}

TEST(Checkpoint, CorruptionDetected) {
  auto enc = testing::small_hash_encoder();
  testing::TempDir dir("ckpt");
  save_checkpoint(dir / "ck", FusionModel(enc, {}, 1), {}, nlohmann::json::object());
  const auto bin = dir / "ck" / "parameters.bin";
  auto bytes = testing::read_text(bin);
  testing::write_text(bin, bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(load_checkpoint(dir / "ck"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "missing"), IoError);
}

}  // namespace
}  // namespace rhp
