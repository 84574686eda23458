#include <chrono>
#include <set>

#include <gtest/gtest.h>

#include "rhp/corpus.hpp"
#include "test_util.hpp"

namespace rhp {
namespace {

using testing::TempDir;
using testing::write_text;

// Interval scan over the class boundaries 1, 2, 4, 8, 16.
HelpfulnessClass interval_oracle(long votes) {
  const long lower[] = {1, 2, 4, 8, 16};
  HelpfulnessClass cls = 0;
  for (int c = 0; c < 5; ++c) {
    if (votes >= lower[c]) cls = c + 1;
  }
  return cls;
}

TEST(BucketVotes, KnownValues) {
  EXPECT_EQ(bucket_votes(1), 1);
  EXPECT_EQ(bucket_votes(7), 3);
  EXPECT_EQ(bucket_votes(16), 5);
  EXPECT_EQ(bucket_votes(10000), 5);
  EXPECT_EQ(bucket_votes(2), 2);
  EXPECT_EQ(bucket_votes(15), 4);
}

TEST(BucketVotes, MatchesIntervalScan) {
  for (long v = 1; v <= 100000; ++v) ASSERT_EQ(bucket_votes(v), interval_oracle(v)) << v;
}

TEST(BucketVotes, RejectsNonPositive) {
  EXPECT_THROW(bucket_votes(0), DomainError);
  EXPECT_THROW(bucket_votes(-3), DomainError);
}

TEST(RecordFormat, RoundTrip) {
  ReviewRecord r{"r1", "u1", "Nice \"quoted\" stay\nsecond line", 12, Date(2019, 5, 4)};
  const auto back = parse_review_line(format_review_line(r));
  EXPECT_EQ(back.review_id, r.review_id);
  EXPECT_EQ(back.reviewer_id, r.reviewer_id);
  EXPECT_EQ(back.text, r.text);
  EXPECT_EQ(back.helpful_votes, 12);
  EXPECT_EQ(back.posted_at, r.posted_at);
  ReviewerProfile p{"u1", 4, 30};
  const auto pb = parse_reviewer_line(format_reviewer_line(p));
  EXPECT_EQ(pb.reviewer_id, "u1");
  EXPECT_EQ(pb.n_reviews, 4);
  EXPECT_EQ(pb.m_votes, 30);
}

TEST(RecordFormat, RejectsMalformed) {
  EXPECT_THROW(parse_review_line("not json"), DataError);
  EXPECT_THROW(parse_review_line(R"({"review_id":"a","reviewer_id":"u","text":"t","helpful_votes":-1,"posted_at":"2020-01-01"})"),
               DataError);
  EXPECT_THROW(parse_review_line(R"({"review_id":"a","reviewer_id":"u","text":"t","helpful_votes":1,"posted_at":"yesterday"})"),
               DataError);
  EXPECT_THROW(parse_reviewer_line(R"({"reviewer_id":"u","n_reviews":0,"m_votes":1})"), DataError);
}

TEST(LoadCorpus, TwoReviewsOneProfile) {
  TempDir dir("corpus");
  write_text(dir / "reviews.jsonl",
             R"({"review_id":"a","reviewer_id":"u","text":"Good.","helpful_votes":3,"posted_at":"2020-01-01"})"
             "\n"
             R"({"review_id":"b","reviewer_id":"u","text":"Bad.","helpful_votes":1,"posted_at":"2020-01-02","extra":1})"
             "\n");
  write_text(dir / "reviewers.jsonl", R"({"reviewer_id":"u","n_reviews":2,"m_votes":4})" "\n");
  const auto c = load_corpus(dir / "reviews.jsonl", dir / "reviewers.jsonl");
  EXPECT_EQ(c.reviews.size(), 2u);
  EXPECT_EQ(c.reviewers.size(), 1u);
  EXPECT_EQ(c.report.malformed_reviews, 0u);
  ASSERT_NE(c.find_review("b"), nullptr);
  EXPECT_EQ(c.find_review("b")->text, "Bad.");
}

TEST(LoadCorpus, EmptyFilesGiveEmptyCorpus) {
  TempDir dir("corpus");
  write_text(dir / "reviews.jsonl", "");
  write_text(dir / "reviewers.jsonl", "");
  const auto c = load_corpus(dir / "reviews.jsonl", dir / "reviewers.jsonl");
  EXPECT_TRUE(c.reviews.empty());
  EXPECT_TRUE(c.reviewers.empty());
}

TEST(LoadCorpus, NegativeVotesCountedAsMalformed) {
  TempDir dir("corpus");
  write_text(dir / "reviews.jsonl",
             R"({"review_id":"a","reviewer_id":"u","text":"x","helpful_votes":-2,"posted_at":"2020-01-01"})" "\n");
  write_text(dir / "reviewers.jsonl", "");
  const auto c = load_corpus(dir / "reviews.jsonl", dir / "reviewers.jsonl");
  EXPECT_TRUE(c.reviews.empty());
  EXPECT_EQ(c.report.malformed_reviews, 1u);
}

TEST(LoadCorpus, MissingFileIsIoError) {
  TempDir dir("corpus");
  write_text(dir / "reviews.jsonl", "");
  try {
    load_corpus(dir / "reviews.jsonl", dir / "absent.jsonl");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("absent.jsonl"), std::string::npos);
  }
}

RawCorpus make_raw(std::size_t n, std::size_t reviewers) {
  RawCorpus raw;
  for (std::size_t r = 0; r < reviewers; ++r) {
    const std::string id = "u" + std::to_string(r);
    raw.reviewers[id] = ReviewerProfile{id, 10, 50};
  }
  for (std::size_t i = 0; i < n; ++i) {
    ReviewRecord rec{"r" + std::to_string(i), "u" + std::to_string(i % reviewers), "Text one. Text two.",
                     static_cast<long>(1 + i % 20), Date(2019, 1, 1).plus_days(static_cast<int>(i))};
    raw.index[rec.review_id] = raw.reviews.size();
    raw.reviews.push_back(rec);
  }
  return raw;
}

TEST(LabelReviews, FiltersZeroVotesAndMissingReviewers) {
  RawCorpus raw = make_raw(6, 2);
  raw.reviews[0].helpful_votes = 0;
  raw.reviews[1].reviewer_id = "ghost";
  const auto set = label_reviews(raw);
  EXPECT_EQ(set.summary.total, 6u);
  EXPECT_EQ(set.summary.zero_votes, 1u);
  EXPECT_EQ(set.summary.missing_reviewer, 1u);
  EXPECT_EQ(set.ids.size(), 4u);
  EXPECT_EQ(set.reference_date, Date(2019, 1, 1).plus_days(5 + 1));
  for (const auto& id : set.ids) {
    const auto* r = raw.find_review(id);
    EXPECT_EQ(set.labels.at(id), bucket_votes(r->helpful_votes));
  }
}

TEST(Splits, SizesAndDeterminism) {
  const auto set = label_reviews(make_raw(100, 7));
  SplitOptions o{{0.8, 0.1, 0.1}, 7, false};
  const auto a = make_splits(set, o);
  const auto b = make_splits(set, o);
  EXPECT_EQ(a.train.size(), 80u);
  EXPECT_EQ(a.valid.size(), 10u);
  EXPECT_EQ(a.test.size(), 10u);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.valid, b.valid);
  EXPECT_EQ(a.test, b.test);
  std::set<std::string> all(a.train.begin(), a.train.end());
  all.insert(a.valid.begin(), a.valid.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 100u);
  o.seed = 8;
  EXPECT_NE(make_splits(set, o).train, a.train);
}

TEST(Splits, RoundingRule) {
  const auto s = split_sizes(5, {0.6, 0.2, 0.2});
  EXPECT_EQ(s[0], 3u);
  EXPECT_EQ(s[1], 1u);
  EXPECT_EQ(s[2], 1u);
}

TEST(Splits, FullCorpusSizes) {
  const auto t = split_sizes(145381 + 8080 + 8080, {145381.0 / 161541, 8080.0 / 161541, 8080.0 / 161541});
  EXPECT_EQ(t[0], 145381u);
  EXPECT_EQ(t[1], 8080u);
  EXPECT_EQ(t[2], 8080u);
}

TEST(Splits, PartitionProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(500);
    const double a = rng.uniform(), b = rng.uniform() * (1 - a);
    const auto s = split_sizes(n, {a, b, 1 - a - b});
    ASSERT_EQ(s[0] + s[1] + s[2], n);
  }
}

TEST(Splits, GroupByReviewerKeepsReviewersTogether) {
  const auto set = label_reviews(make_raw(120, 15));
  const auto c = make_splits(set, {{0.8, 0.1, 0.1}, 3, true});
  std::map<std::string, int> split_of;
  int k = 0;
  for (const auto* part : {&c.train, &c.valid, &c.test}) {
    for (const auto& id : *part) {
      const auto& reviewer = set.reviewer_of.at(id);
      auto [it, inserted] = split_of.emplace(reviewer, k);
      EXPECT_EQ(it->second, k) << reviewer;
    }
    ++k;
  }
}

TEST(Splits, TooFewReviewsIsFatal) {
  const auto set = label_reviews(make_raw(2, 1));
  EXPECT_THROW(make_splits(set, {}), DataError);
}

TEST(Manifest, RoundTrip) {
  const auto set = label_reviews(make_raw(30, 4));
  CorpusManifest m{"/data/reviews.jsonl", "/data/reviewers.jsonl", make_splits(set, {{0.6, 0.2, 0.2}, 5, false})};
  const auto back = manifest_from_string(manifest_to_string(m));
  EXPECT_EQ(back.reviews_path, m.reviews_path);
  EXPECT_EQ(back.corpus.train, m.corpus.train);
  EXPECT_EQ(back.corpus.valid, m.corpus.valid);
  EXPECT_EQ(back.corpus.test, m.corpus.test);
  EXPECT_EQ(back.corpus.labels, m.corpus.labels);
  EXPECT_EQ(back.corpus.reference_date, m.corpus.reference_date);
  EXPECT_THROW(manifest_from_string("{}"), DataError);
}

TEST(SplitStatistics, TinyFixture) {
  RawCorpus raw = make_raw(3, 1);
  raw.reviews[2].text = "One sentence only";
  const auto set = label_reviews(raw);
  const auto c = make_splits(set, {{1.0, 0.0, 0.0}, 1, false});
  ASSERT_EQ(c.train.size(), 3u);
  const auto s = split_statistics(raw, c, c.train);
  EXPECT_EQ(s.samples, 3u);
  EXPECT_DOUBLE_EQ(s.avg_sentences, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.avg_words, 11.0 / 3.0);
  std::size_t total = 0;
  for (auto n : s.class_counts) total += n;
  EXPECT_EQ(total, 3u);
}

}  // namespace
}  // namespace rhp
