#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rhp/evaluation.hpp"

namespace rhp {
namespace {

TEST(Evaluate, HandComputedFixtures) {
  for (const auto& f : testing::metric_fixtures()) {
    const auto r = evaluate(f.preds, f.golds);
    EXPECT_EQ(r.accuracy, f.accuracy);
    EXPECT_EQ(r.mae, f.mae);
    EXPECT_EQ(r.mse, f.mse);
    EXPECT_EQ(r.n, f.preds.size());
    ASSERT_EQ(r.per_example.size(), f.preds.size());
  }
}

TEST(Evaluate, Errors) {
  const std::vector<int> a{1, 2}, b{1}, bad{0, 6};
  EXPECT_THROW(evaluate(a, b), DataError);
  EXPECT_THROW(evaluate(std::vector<int>{}, std::vector<int>{}), DataError);
  EXPECT_THROW(evaluate(bad, a), DomainError);
}

TEST(PairedTTest, MatchesClosedFormOracle) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 2, 4, 5};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t_statistic, -3.0, 1e-12);
  EXPECT_EQ(r.df, 3.0);
  const double oracle = 2.0 * testing::t_cdf_df3(-3.0);
  EXPECT_NEAR(r.p_value, oracle, 1e-6);
  EXPECT_NEAR(r.p_value, 0.0577, 5e-5);
  EXPECT_FALSE(r.significant);
}

TEST(PairedTTest, CdfMatchesClosedFormEverywhere) {
  for (double t = -12; t <= 12; t += 0.37) EXPECT_NEAR(students_t_cdf(t, 3), testing::t_cdf_df3(t), 1e-12) << t;
}

TEST(PairedTTest, ZeroDifferences) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto r = paired_t_test(a, a);
  EXPECT_TRUE(r.zero_differences);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.significant);
}

TEST(PairedTTest, ConstantNonzeroDifference) {
  std::vector<double> a(10), b(10);
  for (int i = 0; i < 10; ++i) {
    b[i] = i * 0.25;
    a[i] = b[i] + 1.0;
  }
  const auto r = paired_t_test(a, b);
  EXPECT_TRUE(std::isinf(r.t_statistic));
  EXPECT_GT(r.t_statistic, 0);
  EXPECT_NEAR(r.p_value, 0.0, 1e-12);
  EXPECT_TRUE(r.significant);
}

TEST(PairedTTest, SymmetryProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.below(30);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(0, 4);
      b[i] = rng.uniform(0, 4);
    }
    const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
    ASSERT_NEAR(ab.t_statistic, -ba.t_statistic, 1e-12);
    ASSERT_NEAR(ab.p_value, ba.p_value, 1e-12);
    ASSERT_GE(ab.p_value, 0.0);
    ASSERT_LE(ab.p_value, 1.0);
  }
}

TEST(PairedTTest, LengthMismatch) {
  EXPECT_THROW(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{1}), DataError);
}

TEST(CompareSystems, RequiresSameGolds) {
  const auto a = evaluate(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3});
  const auto b = evaluate(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 4});
  EXPECT_THROW(compare_systems(a, b, Metric::accuracy), DataError);
}

TEST(MetricsTable, FourRowsWithDagger) {
  std::vector<int> golds(40), good(40), bad(40);
  for (int i = 0; i < 40; ++i) {
    golds[i] = 1 + i % 5;
    good[i] = golds[i];
    bad[i] = golds[i] == 5 ? 1 : golds[i] + 1;
  }
  good[0] = 2;
  std::vector<SystemResult> systems{{"RHP (full)", evaluate(good, golds)},
                                    {"w/o Expertise", evaluate(bad, golds)},
                                    {"w/o Temporal", evaluate(good, golds)},
                                    {"w/o Expertise + Temporal", evaluate(bad, golds)}};
  const auto table = render_metrics_table(systems, 0);
  EXPECT_NE(table.find("RHP (full)"), std::string::npos);
  EXPECT_NE(table.find("97.50"), std::string::npos);
  EXPECT_NE(table.find("†"), std::string::npos);
  std::size_t lines = 0;
  for (char c : table) lines += c == '\n';
  EXPECT_EQ(lines, 2u + 4u + 1u);
}

}  // namespace
}  // namespace rhp
