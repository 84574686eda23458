#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <numbers>
#include <utility>
#include <vector>

#include "rhp/analysis.hpp"

namespace rhp::testing {

struct MetricFixture {
  std::vector<int> preds;
  std::vector<int> golds;
  double accuracy;
  double mae;
  double mse;
};

// Computed by hand with exact fractions.
inline const std::vector<MetricFixture>& metric_fixtures() {
  static const std::vector<MetricFixture> f{
      {{1, 2, 3}, {1, 2, 3}, 1.0 / 1, 0.0 / 1, 0.0 / 1},
      {{1, 3}, {2, 1}, 0.0 / 1, 3.0 / 2, 5.0 / 2},
      {{3, 1, 4, 4, 2}, {1, 1, 1, 4, 5}, 2.0 / 5, 8.0 / 5, 22.0 / 5},
      {{1, 2, 5, 5, 3, 3}, {2, 1, 3, 2, 1, 3}, 1.0 / 6, 3.0 / 2, 19.0 / 6},
      {{2, 2, 3, 3, 3, 1}, {5, 3, 4, 5, 2, 2}, 0.0 / 1, 3.0 / 2, 17.0 / 6},
      {{4, 3, 1, 5, 3}, {1, 3, 5, 3, 5}, 1.0 / 5, 11.0 / 5, 33.0 / 5},
      {{4, 4, 5, 3, 4}, {4, 2, 2, 3, 3}, 2.0 / 5, 6.0 / 5, 14.0 / 5},
      {{1, 1}, {4, 3}, 0.0 / 1, 5.0 / 2, 13.0 / 2},
      {{3, 2, 2, 1, 4, 2, 4, 3, 2}, {3, 4, 5, 3, 5, 2, 3, 1, 1}, 2.0 / 9, 4.0 / 3, 8.0 / 3},
      {{3, 5, 5, 2, 1}, {3, 2, 3, 4, 1}, 2.0 / 5, 7.0 / 5, 17.0 / 5},
  };
  return f;
}

// Closed-form Student t CDF for three degrees of freedom:
// F(t) = 1/2 + (atan(u) + u / (1 + u^2)) / pi with u = t / sqrt(3).
inline double t_cdf_df3(double t) {
  const double u = t / std::sqrt(3.0);
  return 0.5 + (std::atan(u) + u / (1.0 + u * u)) / std::numbers::pi;
}

// Dunning's G^2 statistic over the 2x2 contingency table of a bigram, an
// independent formulation of the binomial likelihood ratio. The table is
// transposed to c1 <= c2 so mathematically equal scores compare equal.
inline double g_squared(double c12, double c1, double c2, double n) {
  if (c1 > c2) std::swap(c1, c2);
  const double obs[4] = {c12, c1 - c12, c2 - c12, n - c1 - c2 + c12};
  const double row[2] = {c1, n - c1};
  const double col[2] = {c2, n - c2};
  double g = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double o = obs[i * 2 + j];
      const double e = row[i] * col[j] / n;
      if (o > 0) g += o * std::log(o / e);
    }
  }
  return 2.0 * g;
}

// Exhaustive recomputation: count every adjacent pair by scanning the whole
// corpus for each distinct pair, score with G^2, sort, truncate.
inline std::vector<RankedNgram> brute_force_bigrams(const ClassSentences& s, std::size_t k, std::size_t min_freq) {
  std::vector<std::pair<std::string, std::string>> pairs;
  double n = 0;
  for (const auto& sent : s) {
    n += static_cast<double>(sent.size());
    for (std::size_t i = 0; i + 1 < sent.size(); ++i) pairs.emplace_back(sent[i], sent[i + 1]);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<RankedNgram> out;
  for (const auto& [a, b] : pairs) {
    double c12 = 0, c1 = 0, c2 = 0;
    for (const auto& sent : s) {
      for (std::size_t i = 0; i < sent.size(); ++i) {
        c1 += sent[i] == a;
        c2 += sent[i] == b;
        if (i + 1 < sent.size()) c12 += sent[i] == a && sent[i + 1] == b;
      }
    }
    if (c12 < static_cast<double>(min_freq)) continue;
    out.push_back({a + " " + b, g_squared(c12, c1, c2, n), static_cast<std::size_t>(c12)});
  }
  std::sort(out.begin(), out.end(), [](const RankedNgram& x, const RankedNgram& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.ngram < y.ngram;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace rhp::testing
