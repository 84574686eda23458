// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>

#include <fmt/format.h>

#include "../fixtures.hpp"
#include "../gradient_check.hpp"
#include "../test_util.hpp"
#include "rhp/analysis.hpp"
#include "rhp/corpus.hpp"
#include "rhp/dataset.hpp"
#include "rhp/evaluation.hpp"
#include "rhp/features.hpp"
#include "rhp/interpret.hpp"
#include "rhp/synthetic.hpp"
#include "rhp/training.hpp"

namespace rhp::acceptance {
namespace {

using Clock = std::chrono::steady_clock;

// Pinned limits and tolerances.
constexpr double kBucketSeconds = 1.0;
constexpr long kBucketMaxVotes = 100000;
constexpr double kRoundTripTolerance = 1e-9;
constexpr int kRoundTripSamples = 10000;
constexpr double kGradientTolerance = 1e-4;
constexpr int kGradientInstances = 24;
constexpr std::size_t kGradientMaxTokens = 16;
constexpr double kGradientSeconds = 30.0;
constexpr std::size_t kOverfitExamples = 32;
constexpr std::size_t kOverfitEpochs = 50;
constexpr double kOverfitAccuracy = 0.95;
constexpr double kOverfitSeconds = 60.0;
constexpr int kAblationSeeds = 5;
constexpr std::size_t kAblationReviews = 1500;
constexpr double kAblationMarginPoints = 10.0;
constexpr double kAblationSeconds = 300.0;
constexpr double kTTestTolerance = 1e-6;
constexpr double kIndependenceTolerance = 1e-6;
constexpr std::size_t kMaxOracleSentences = 50;
constexpr std::size_t kAttributionSteps = 256;
constexpr int kAttributionExamples = 20;
constexpr double kCompletenessFraction = 0.01;
constexpr double kLinearTolerance = 1e-9;
constexpr double kEndToEndSeconds = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome bucketing() {
  const auto start = Clock::now();
  long mismatches = 0;
  for (long v = 1; v <= kBucketMaxVotes; ++v) {
    HelpfulnessClass oracle = 0;
    for (long lower = 1, c = 1; c <= kNumClasses; lower *= 2, ++c) {
      if (v >= lower) oracle = static_cast<HelpfulnessClass>(c);
    }
    mismatches += bucket_votes(v) != oracle;
  }
  const double s = seconds_since(start);
  return {mismatches == 0 && s < kBucketSeconds,
          fmt::format("{} mismatches over 1..{}, {:.3f} s", mismatches, kBucketMaxVotes, s)};
}

Outcome normalization() {
  Rng rng(2);
  double worst = 0.0;
  for (int i = 0; i < kRoundTripSamples; ++i) {
    const double lo = rng.uniform(-1000, 1000);
    const double hi = lo + rng.uniform(1e-3, 5000);
    const double a = rng.uniform(-5, 5);
    const double b = a + rng.uniform(0.1, 10);
    const double x = rng.uniform(lo, hi);
    const double back = denormalize(normalize(x, {lo, hi}, {a, b}), {lo, hi}, {a, b});
    worst = std::max(worst, std::abs(back - x) / std::max(std::abs(x), 1e-300));
  }
  const bool degenerate = normalize(4.0, {7, 7}, {2, 3}) == 2.0 && normalize(7.0, {7, 7}) == 0.0;
  const bool clamped = normalize(12, {0, 10}) == 1.0 && normalize(-1, {0, 10}) == 0.0 &&
                       normalize(10, {0, 10}, {2, 4}) == 4.0 && normalize(0, {0, 10}, {2, 4}) == 2.0 &&
                       std::abs(normalize(3, {0, 10}, {2, 4}) - 2.6) < 1e-12;
  return {worst <= kRoundTripTolerance && degenerate && clamped,
          fmt::format("worst relative round-trip error {:.2e}; degenerate {}, clamping {}", worst, degenerate ? "ok" : "BAD",
                      clamped ? "ok" : "BAD")};
}

Outcome gradients() {
  const auto start = Clock::now();
  Rng rng(3);
  std::size_t checked = 0, failures = 0;
  double worst = 0.0;
  for (int i = 0; i < kGradientInstances; ++i) {
    auto enc = testing::small_hash_encoder(8, 6);
    FusionModel m(enc, {}, 1000 + static_cast<std::uint64_t>(i));
    const auto ex = testing::random_example(*enc, rng, kGradientMaxTokens);
    const auto r = testing::check_gradients(m, ex, {"classifier.", "expertise.", "temporal.", "encoder.projection."},
                                            rng, kGradientTolerance);
    checked += r.checked;
    failures += r.failures.size();
    worst = std::max(worst, r.worst);
  }
  const double s = seconds_since(start);
  return {failures == 0 && checked > 0 && s < kGradientSeconds,
          fmt::format("{} instances, {} coordinates, worst relative error {:.2e}, {:.2f} s", kGradientInstances, checked,
                      worst, s)};
}

struct SyntheticData {
  std::shared_ptr<TextEncoder> encoder;
  Dataset data;
};

SyntheticData synthetic_dataset(const SyntheticOptions& options, const SplitRatios& ratios, std::uint64_t seed) {
  testing::TempDir dir("acceptance");
  write_synthetic(generate_synthetic(options), dir.path());
  const auto raw = load_corpus(dir / "reviews.jsonl", dir / "reviewers.jsonl");
  const auto labeled = make_splits(label_reviews(raw), {ratios, seed, false});
  auto vocab = Vocabulary::build(review_texts(raw, labeled.train), true, 2, 30000);
  auto enc = std::make_shared<HashEncoder>(WordPieceTokenizer(std::move(vocab), true), HashEncoder::Options{});
  auto data = build_dataset(raw, labeled, enc->tokenizer(), 512);
  return {enc, std::move(data)};
}

Outcome overfit() {
  const auto start = Clock::now();
  SyntheticOptions so;
  so.reviews = kOverfitExamples;
  so.seed = 4;
  so.zero_vote_fraction = 0.0;
  const auto sd = synthetic_dataset(so, {1.0, 0.0, 0.0}, 4);
  TrainConfig c;
  c.learning_rate = 1e-2;
  c.batch_size = 8;
  c.epochs = kOverfitEpochs;
  c.seed = 4;
  const auto r = train(FusionModel(sd.encoder, {}, 4), sd.data.train, sd.data.train, c);
  const auto acc = evaluate_model(r.model, sd.data.train, Exec::parallel).accuracy;
  const double s = seconds_since(start);
  return {sd.data.train.size() == kOverfitExamples && acc >= kOverfitAccuracy && s < kOverfitSeconds,
          fmt::format("{} examples, {} epochs, train accuracy {:.2f}%, {:.2f} s", sd.data.train.size(), kOverfitEpochs,
                      100 * acc, s)};
}

Outcome ablation() {
  const auto start = Clock::now();
  std::array<double, 4> sum{};
  std::vector<std::string> names;
  for (int seed = 1; seed <= kAblationSeeds; ++seed) {
    SyntheticOptions so;
    so.reviews = kAblationReviews;
    so.seed = static_cast<std::uint64_t>(seed);
    const auto sd = synthetic_dataset(so, {0.8, 0.1, 0.1}, static_cast<std::uint64_t>(seed));
    TrainConfig c;
    c.learning_rate = 3e-3;
    c.batch_size = 32;
    c.epochs = 10;
    c.seed = static_cast<std::uint64_t>(seed);
    const auto runs = run_ablations(sd.encoder, {}, sd.data, c, static_cast<std::uint64_t>(seed));
    names.clear();
    for (std::size_t v = 0; v < runs.size(); ++v) {
      sum[v] += 100.0 * runs[v].test_metrics.accuracy;
      names.push_back(runs[v].variant.name);
    }
  }
  std::string detail;
  for (std::size_t v = 0; v < names.size(); ++v) {
    sum[v] /= kAblationSeeds;
    detail += fmt::format("{}{} {:.2f}", v ? ", " : "", names[v], sum[v]);
  }
  const double s = seconds_since(start);
  const double margin = sum[0] - sum[3];
  return {margin >= kAblationMarginPoints && s < kAblationSeconds,
          fmt::format("mean test accuracy over {} seeds: {}; full minus text-only {:.2f} points, {:.1f} s",
                      kAblationSeeds, detail, margin, s)};
}

Outcome metrics() {
  std::size_t exact = 0;
  for (const auto& f : testing::metric_fixtures()) {
    const auto r = evaluate(f.preds, f.golds);
    exact += r.accuracy == f.accuracy && r.mae == f.mae && r.mse == f.mse;
  }
  const auto t = paired_t_test(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 2, 4, 5});
  const double oracle = 2.0 * testing::t_cdf_df3(-3.0);
  const double err = std::abs(t.p_value - oracle);
  const bool t_ok = std::abs(t.t_statistic + 3.0) < 1e-12 && t.df == 3.0 && err <= kTTestTolerance;
  return {exact == testing::metric_fixtures().size() && t_ok,
          fmt::format("{}/{} fixtures exact; t = {:.6f}, p = {:.6f} vs oracle {:.6f}", exact,
                      testing::metric_fixtures().size(), t.t_statistic, t.p_value, oracle)};
}

Outcome collocations() {
  double worst_independent = 0.0;
  for (double n : {100.0, 400.0, 1000.0}) {
    for (double c1 : {10.0, 20.0, 50.0}) {
      for (double c2 : {10.0, 20.0, 50.0}) {
        const double c12 = c1 * c2 / n;
        if (c12 != std::floor(c12)) continue;
        worst_independent = std::max(worst_independent, std::abs(likelihood_ratio(c12, c1, c2, n)));
      }
    }
  }
  Rng rng(7);
  const std::vector<std::string> words{"front", "desk", "resort", "fee", "bed", "bug", "beach", "chair", "car", "cable"};
  int agree = 0;
  const int corpora = 100;
  for (int trial = 0; trial < corpora; ++trial) {
    ClassSentences s(1 + rng.below(kMaxOracleSentences));
    for (auto& sent : s) {
      const auto len = rng.below(10);
      for (std::uint64_t i = 0; i < len; ++i) {
        if (rng.uniform() < 0.25 && i + 1 < len) {
          sent.push_back("resort");
          sent.push_back("fee");
          ++i;
        } else {
          sent.push_back(words[rng.below(words.size())]);
        }
      }
    }
    const std::size_t k = 1 + rng.below(8), min_freq = rng.below(4);
    const auto got = rank_bigrams(s, k, min_freq);
    const auto want = testing::brute_force_bigrams(s, k, min_freq);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].ngram == want[i].ngram && got[i].count == want[i].count &&
             std::abs(got[i].score - want[i].score) <= 1e-6 * std::max(1.0, want[i].score);
    }
    agree += same;
  }
  return {worst_independent < kIndependenceTolerance && agree == corpora,
          fmt::format("max |score| at independence {:.2e}; top-K equal to brute force on {}/{} corpora", worst_independent,
                      agree, corpora)};
}

Outcome attribution() {
  Rng rng(8);
  double worst_fraction = 0.0;
  for (int i = 0; i < kAttributionExamples; ++i) {
    auto enc = testing::small_hash_encoder(16, 12);
    FusionModel m(enc, {}, 500 + static_cast<std::uint64_t>(i));
    const auto ex = testing::random_example(*enc, rng, 16);
    const auto r = attribute(m, ex, kAttributionSteps);
    const double span = std::abs(r.f_input - r.f_baseline);
    const double sum = std::accumulate(r.scores.begin(), r.scores.end(), 0.0);
    const double gap = std::abs(sum - (r.f_input - r.f_baseline));
    worst_fraction = std::max(worst_fraction, span > 0 ? gap / span : (gap > 0 ? 1.0 : 0.0));
  }
  double worst_linear = 0.0;
  for (std::size_t steps : {1u, 3u, 17u, 256u}) {
    Matrix w(6, 5), x(6, 5);
    for (auto& v : w.data()) v = rng.uniform(-2, 2);
    for (auto& v : x.data()) v = rng.uniform(-2, 2);
    const DifferentiableFn f = [&w](const Matrix& at, Matrix* grad) {
      double y = 0;
      for (std::size_t j = 0; j < at.data().size(); ++j) y += w.data()[j] * at.data()[j];
      if (grad != nullptr) *grad = w;
      return y;
    };
    const auto ig = integrated_gradients(f, x, Matrix(6, 5), steps);
    for (std::size_t j = 0; j < x.data().size(); ++j) {
      worst_linear = std::max(worst_linear, std::abs(ig.attributions.data()[j] - w.data()[j] * x.data()[j]));
    }
    worst_linear = std::max(worst_linear, ig.completeness_gap);
  }
  return {worst_fraction <= kCompletenessFraction && worst_linear <= kLinearTolerance,
          fmt::format("worst completeness gap {:.4f}% of |F(x)-F(x')| at {} steps; linear surrogate error {:.1e}",
                      100 * worst_fraction, kAttributionSteps, worst_linear)};
}

Outcome end_to_end() {
  const auto start = Clock::now();
  testing::TempDir dir("e2e");
  const auto root = dir / "runs";
  const auto log = dir / "log.txt";
  const std::string cli = RHP_CLI_PATH;
  setenv("RHP_RUN_ROOT", root.c_str(), 1);
  const auto corpus = dir / "corpus";
  const std::vector<std::string> commands{
      fmt::format("synth --reviews 200 --out '{}'", corpus.string()),
      fmt::format("prepare --reviews '{}' --reviewers '{}'", (corpus / "reviews.jsonl").string(),
                  (corpus / "reviewers.jsonl").string()),
      "train --epochs 2", "ablate --epochs 2", "eval", "analyze", "explain"};
  for (const auto& c : commands) {
    const std::string line = fmt::format("'{}' --seed 9 {} >> '{}' 2>&1", cli, c, log.string());
    const int rc = std::system(line.c_str());
    if (rc != 0) {
      unsetenv("RHP_RUN_ROOT");
      return {false, fmt::format("'{}' exited with status {}; log:\n{}", c, rc, testing::read_text(log))};
    }
  }
  unsetenv("RHP_RUN_ROOT");
  const std::vector<std::string> files{
      "prepare/manifest.json",       "prepare/statistics.json",     "prepare/statistics.txt",  "prepare/config.json",
      "train/checkpoint/manifest.json", "train/checkpoint/parameters.bin", "train/checkpoint/vocab.txt",
      "train/train_log.jsonl",       "train/metrics.json",          "train/predictions_test.jsonl",
      "ablate/ablation.json",        "ablate/ablation_table.txt",   "eval/metrics.json",       "eval/predictions.jsonl",
      "eval/metrics_table.txt",      "analyze/analysis.json",       "analyze/analysis_table.txt",
      "explain/attributions.jsonl",  "explain/heat_report.txt"};
  std::vector<std::string> missing;
  for (const auto& f : files) {
    if (!std::filesystem::exists(root / f) || std::filesystem::file_size(root / f) == 0) missing.push_back(f);
  }
  const auto table = testing::read_text(root / "ablate" / "ablation_table.txt");
  const bool four_rows = table.find("RHP (full)") != std::string::npos &&
                         table.find("w/o Expertise + Temporal") != std::string::npos;
  const double s = seconds_since(start);
  return {missing.empty() && four_rows && s < kEndToEndSeconds,
          fmt::format("{} commands, {}/{} report files present, ablation grid {}, {:.1f} s", commands.size(),
                      files.size() - missing.size(), files.size(), four_rows ? "ok" : "BAD", s)};
}

}  // namespace
}  // namespace rhp::acceptance

int main() {
  using namespace rhp::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 vote bucketing", bucketing},        {"AC2 normalization", normalization},
      {"AC3 gradient suite", gradients},        {"AC4 overfit sanity", overfit},
      {"AC5 directional ablation", ablation},   {"AC6 metrics and t-test", metrics},
      {"AC7 collocations", collocations},       {"AC8 attribution completeness", attribution},
      {"AC9 end-to-end pipeline", end_to_end}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
