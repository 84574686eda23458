#include <cstdio>

#include <gtest/gtest.h>

#include "rhp/cli.hpp"
#include "rhp/config.hpp"
#include "rhp/kernels.hpp"
#include "rhp/synthetic.hpp"
#include "test_util.hpp"

namespace rhp {
namespace {

using testing::read_text;
using testing::TempDir;
using testing::write_text;

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "rhp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data());
  std::fflush(stdout);
  return rc;
}

TEST(Kernels, ParallelMatmulMatchesSerialAndNaive) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.below(40), k = 1 + rng.below(40), n = 1 + rng.below(40);
    Matrix a(m, k), b(n, k), bt(k, n);
    for (auto& v : a.data()) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) bt(j, i) = b(i, j) = rng.uniform(-1, 1);
    }
    Matrix s(m, n), p(m, n), nn(m, n);
    kernels::matmul_nt(Exec::serial, a.view(), b.view(), s.view());
    kernels::matmul_nt(Exec::parallel, a.view(), b.view(), p.view());
    kernels::matmul_nn(Exec::parallel, a.view(), bt.view(), nn.view());
    EXPECT_EQ(s, p);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double ref = 0;
        for (std::size_t t = 0; t < k; ++t) ref += a(i, t) * b(j, t);
        EXPECT_NEAR(s(i, j), ref, 1e-12);
        EXPECT_NEAR(nn(i, j), ref, 1e-12);
      }
    }
  }
}

TEST(Synthetic, DeterministicAndConsistent) {
  SyntheticOptions o;
  o.reviews = 150;
  o.seed = 9;
  const auto a = generate_synthetic(o), b = generate_synthetic(o);
  ASSERT_EQ(a.reviews.size(), b.reviews.size());
  for (std::size_t i = 0; i < a.reviews.size(); ++i) EXPECT_EQ(format_review_line(a.reviews[i]), format_review_line(b.reviews[i]));
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < a.reviews.size(); ++i) {
    if (a.intended_class[i] == 0) {
      EXPECT_EQ(a.reviews[i].helpful_votes, 0);
      continue;
    }
    ++labeled;
    EXPECT_EQ(bucket_votes(a.reviews[i].helpful_votes), a.intended_class[i]);
    EXPECT_LT(a.reviews[i].posted_at, o.reference_date);
  }
  EXPECT_EQ(labeled, 150u);
  std::map<std::string, long> votes;
  for (const auto& r : a.reviews) votes[r.reviewer_id] = std::max(votes[r.reviewer_id], r.helpful_votes);
  for (const auto& p : a.reviewers) EXPECT_GE(p.m_votes, votes[p.reviewer_id]);
}

TEST(RunConfig, DefaultsRoundTripAndUnknownKeys) {
  const RunConfig c;
  EXPECT_EQ(RunConfig::from_json(c.to_json()).to_json(), c.to_json());
  EXPECT_THROW(RunConfig::from_json({{"trian", {{"epochs", 2}}}}), DataError);
  EXPECT_THROW(RunConfig::from_json({{"train", {{"epoch", 2}}}}), DataError);
  const auto d = RunConfig::from_json({{"seed", 7}, {"train", {{"epochs", 2}}}, {"split", {{"reference_date", "2020-01-01"}}}});
  EXPECT_EQ(d.seed, 7u);
  EXPECT_EQ(d.train.seed, 7u);
  EXPECT_EQ(d.train.epochs, 2u);
  EXPECT_EQ(d.split.reference_date.value_or(""), "2020-01-01");
  EXPECT_THROW(RunConfig::from_json({{"encoder", {{"backend", "gpt"}}}}), DataError);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::make_unique<TempDir>("cli");
    setenv("RHP_RUN_ROOT", (dir_->path() / "runs").c_str(), 1);
  }
  void TearDown() override { unsetenv("RHP_RUN_ROOT"); }
  std::filesystem::path root() const { return dir_->path() / "runs"; }
  std::unique_ptr<TempDir> dir_;
};

TEST_F(CliTest, TinyFixturePrepare) {
  write_text(*dir_ / "reviews.jsonl",
             R"({"review_id":"a","reviewer_id":"u","text":"Nice room. Clean.","helpful_votes":3,"posted_at":"2020-01-01"})" "\n"
             R"({"review_id":"b","reviewer_id":"u","text":"Bad staff.","helpful_votes":9,"posted_at":"2020-02-01"})" "\n"
             R"({"review_id":"c","reviewer_id":"v","text":"The pool was great.","helpful_votes":1,"posted_at":"2020-03-01"})" "\n");
  write_text(*dir_ / "reviewers.jsonl",
             R"({"reviewer_id":"u","n_reviews":2,"m_votes":12})" "\n" R"({"reviewer_id":"v","n_reviews":1,"m_votes":1})" "\n");
  ::testing::internal::CaptureStdout();
  const int rc = run({"prepare", "--reviews", (*dir_ / "reviews.jsonl").string(), "--reviewers",
                      (*dir_ / "reviewers.jsonl").string()});
  const auto out = ::testing::internal::GetCapturedStdout();
  ASSERT_EQ(rc, 0);
  const auto stats = nlohmann::json::parse(read_text(root() / "prepare" / "statistics.json"));
  EXPECT_EQ(stats["train"]["samples"].get<int>() + stats["valid"]["samples"].get<int>() +
                stats["test"]["samples"].get<int>(),
            3);
  EXPECT_EQ(stats["labeling"]["labeled"], 3);
  EXPECT_NE(out.find("#Samples"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(root() / "prepare" / "manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(root() / "prepare" / "config.json"));
}

TEST_F(CliTest, MissingReviewerFileNamesPath) {
  write_text(*dir_ / "reviews.jsonl", "");
  const auto missing = (*dir_ / "no_such_reviewers.jsonl").string();
  ::testing::internal::CaptureStderr();
  const int rc = run({"prepare", "--reviews", (*dir_ / "reviews.jsonl").string(), "--reviewers", missing});
  const auto err = ::testing::internal::GetCapturedStderr();
  EXPECT_NE(rc, 0);
  EXPECT_NE(err.find("no_such_reviewers.jsonl"), std::string::npos);
  const auto line = nlohmann::json::parse(err.substr(err.find('{')));
  EXPECT_EQ(line["error"]["type"], "IoError");
  EXPECT_EQ(line["error"]["command"], "prepare");
}

TEST_F(CliTest, EvalOnEqualPredictions) {
  std::string lines;
  for (int i = 0; i < 10; ++i) lines += fmt::format(R"({{"gold":{0},"pred":{0}}})" "\n", 1 + i % 5);
  write_text(*dir_ / "perfect.jsonl", lines);
  ::testing::internal::CaptureStdout();
  const int rc = run({"eval", "--predictions", (*dir_ / "perfect.jsonl").string()});
  const auto out = ::testing::internal::GetCapturedStdout();
  ASSERT_EQ(rc, 0);
  EXPECT_NE(out.find("100.00"), std::string::npos);
  const auto m = nlohmann::json::parse(read_text(root() / "eval" / "metrics.json"));
  EXPECT_EQ(m["systems"][0]["metrics"]["accuracy"], 1.0);
  EXPECT_EQ(m["systems"][0]["metrics"]["mae"], 0.0);
}

TEST_F(CliTest, UnknownConfigKeyFails) {
  write_text(*dir_ / "bad.json", R"({"train":{"learning_rte":0.1}})");
  ::testing::internal::CaptureStderr();
  const int rc = run({"--config", (*dir_ / "bad.json").string(), "eval", "--predictions", "x"});
  const auto err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(rc, 1);
  EXPECT_NE(err.find("learning_rte"), std::string::npos);
}

TEST_F(CliTest, TrainExplainOnSyntheticCorpus) {
  ::testing::internal::CaptureStdout();
  ASSERT_EQ(run({"--seed", "3", "synth", "--reviews", "120", "--out", (*dir_ / "corpus").string()}), 0);
  ASSERT_EQ(run({"prepare", "--reviews", (*dir_ / "corpus" / "reviews.jsonl").string(), "--reviewers",
                 (*dir_ / "corpus" / "reviewers.jsonl").string()}),
            0);
  ASSERT_EQ(run({"train", "--epochs", "2", "--lr", "0.003"}), 0);
  ::testing::internal::GetCapturedStdout();
  ::testing::internal::CaptureStdout();
  ASSERT_EQ(run({"explain", "--count", "2"}), 0);
  const auto out = ::testing::internal::GetCapturedStdout();
  EXPECT_NE(out.find("top-10:"), std::string::npos);
  const auto lines = read_text(root() / "explain" / "attributions.jsonl");
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
  const auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  EXPECT_EQ(first["top_k"].size(), 10u);
  EXPECT_TRUE(std::filesystem::exists(root() / "train" / "checkpoint" / "manifest.json"));
  const auto log = read_text(root() / "train" / "train_log.jsonl");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
}

}  // namespace
}  // namespace rhp
