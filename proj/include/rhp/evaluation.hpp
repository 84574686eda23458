#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/common.hpp"

namespace rhp {

struct ExampleOutcome {
  HelpfulnessClass gold = 1;
  HelpfulnessClass pred = 1;
  double abs_err = 0.0;
  double sq_err = 0.0;
  bool correct = false;
};

struct MetricsReport {
  double accuracy = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  std::size_t n = 0;
  std::vector<ExampleOutcome> per_example;

  nlohmann::json to_json(bool include_examples = false) const;
};

// Accuracy, MAE and MSE over class integers. Throws DataError for empty or
// mismatched inputs and DomainError for values outside 1..5.
MetricsReport evaluate(std::span<const HelpfulnessClass> preds, std::span<const HelpfulnessClass> golds);

enum class Metric { accuracy, mae, mse };

std::string metric_name(Metric m);

// The per-example quantity whose mean is the metric: 0/1 correctness,
// absolute error or squared error.
std::vector<double> per_example_values(const MetricsReport& report, Metric metric);

struct SignificanceResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
  // Set when every paired difference is zero and t is undefined.
  bool zero_differences = false;
  std::size_t df = 0;
  std::string metric;

  nlohmann::json to_json() const;
};

inline constexpr double kSignificanceLevel = 0.05;

// Two-tailed paired t-test on a[i] - b[i]. Requires equal lengths >= 2.
// All-zero differences give p = 1 (flagged); zero variance with a nonzero
// mean gives |t| = inf and p = 0.
SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b, std::string metric = "");

SignificanceResult compare_systems(const MetricsReport& a, const MetricsReport& b, Metric metric);

// Student t cumulative distribution function.
double students_t_cdf(double t, double df);

struct SystemResult {
  std::string name;
  MetricsReport report;
};

// Systems x {Acc, MAE, MSE} grid. A dagger marks a metric whose difference
// from the reference row is significant at the 5% level.
std::string render_metrics_table(std::span<const SystemResult> systems, std::size_t reference = 0);

}  // namespace rhp
