#include "rhp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

namespace rhp {

nlohmann::json MetricsReport::to_json(bool include_examples) const {
  nlohmann::json j{{"accuracy", accuracy}, {"mae", mae}, {"mse", mse}, {"n", n}};
  if (include_examples) {
    auto rows = nlohmann::json::array();
    for (const auto& e : per_example) {
      rows.push_back({{"gold", e.gold},
                      {"pred", e.pred},
                      {"abs_err", e.abs_err},
                      {"sq_err", e.sq_err},
                      {"correct", e.correct}});
    }
    j["per_example"] = std::move(rows);
  }
  return j;
}

MetricsReport evaluate(std::span<const HelpfulnessClass> preds, std::span<const HelpfulnessClass> golds) {
  if (preds.size() != golds.size()) {
    throw DataError("prediction/gold length mismatch: " + std::to_string(preds.size()) + " vs " +
                    std::to_string(golds.size()));
  }
  if (preds.empty()) throw DataError("cannot evaluate an empty prediction list");
  MetricsReport r;
  r.n = preds.size();
  r.per_example.reserve(r.n);
  std::size_t correct = 0;
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < r.n; ++i) {
    if (!is_valid_class(preds[i]) || !is_valid_class(golds[i])) {
      throw DomainError("class outside 1..5 at position " + std::to_string(i));
    }
    ExampleOutcome e;
    e.gold = golds[i];
    e.pred = preds[i];
    const double diff = static_cast<double>(e.pred - e.gold);
    e.abs_err = std::abs(diff);
    e.sq_err = diff * diff;
    e.correct = e.pred == e.gold;
    correct += e.correct ? 1 : 0;
    abs_sum += e.abs_err;
    sq_sum += e.sq_err;
    r.per_example.push_back(e);
  }
  const double n = static_cast<double>(r.n);
  r.accuracy = static_cast<double>(correct) / n;
  r.mae = abs_sum / n;
  r.mse = sq_sum / n;
  return r;
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::accuracy: return "accuracy";
    case Metric::mae: return "mae";
    case Metric::mse: return "mse";
  }
  return "unknown";
}

std::vector<double> per_example_values(const MetricsReport& report, Metric metric) {
  std::vector<double> out;
  out.reserve(report.per_example.size());
  for (const auto& e : report.per_example) {
    switch (metric) {
      case Metric::accuracy: out.push_back(e.correct ? 1.0 : 0.0); break;
      case Metric::mae: out.push_back(e.abs_err); break;
      case Metric::mse: out.push_back(e.sq_err); break;
    }
  }
  return out;
}

nlohmann::json SignificanceResult::to_json() const {
  auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  return {{"t_statistic", finite_or_null(t_statistic)},
          {"p_value", p_value},
          {"significant", significant},
          {"zero_differences", zero_differences},
          {"df", df},
          {"metric", metric}};
}

double students_t_cdf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b, std::string metric) {
  if (a.size() != b.size()) throw DataError("paired t-test needs equal-length samples");
  if (a.size() < 2) throw DataError("paired t-test needs at least two pairs");
  SignificanceResult r;
  r.metric = std::move(metric);
  const std::size_t n = a.size();
  r.df = n - 1;

  double mean = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    mean += d;
    all_zero = all_zero && d == 0.0;
  }
  if (all_zero) {
    r.zero_differences = true;
    r.t_statistic = 0.0;
    r.p_value = 1.0;
    r.significant = false;
    return r;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    r.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
  } else {
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    const auto dist = boost::math::students_t_distribution<double>(static_cast<double>(r.df));
    r.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic))), 0.0, 1.0);
  }
  r.significant = r.p_value < kSignificanceLevel;
  return r;
}

SignificanceResult compare_systems(const MetricsReport& a, const MetricsReport& b, Metric metric) {
  if (a.n != b.n) throw DataError("systems were evaluated on different example counts");
  for (std::size_t i = 0; i < a.n; ++i) {
    if (a.per_example[i].gold != b.per_example[i].gold) {
      throw DataError("systems disagree on the gold label at position " + std::to_string(i) +
                      "; comparisons must be paired");
    }
  }
  return paired_t_test(per_example_values(a, metric), per_example_values(b, metric), metric_name(metric));
}

std::string render_metrics_table(std::span<const SystemResult> systems, std::size_t reference) {
  std::size_t width = 6;
  for (const auto& s : systems) width = std::max(width, s.name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>7}  {:>7}\n", "System", width, "Acc", "MAE", "MSE");
  out += std::string(width + 30, '-') + "\n";
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto& r = systems[i].report;
    auto mark = [&](Metric m) -> std::string {
      if (i == reference || reference >= systems.size() || r.n < 2) return " ";
      return compare_systems(r, systems[reference].report, m).significant ? "†" : " ";
    };
    out += fmt::format("{:<{}}  {:>7.2f}{}  {:>6.3f}{}  {:>6.3f}{}\n", systems[i].name, width, 100.0 * r.accuracy,
                       mark(Metric::accuracy), r.mae, mark(Metric::mae), r.mse, mark(Metric::mse));
  }
  if (reference < systems.size() && systems.size() > 1) {
    out += fmt::format("† significant difference from '{}' (paired t-test, p < 0.05)\n",
                       systems[reference].name);
  }
  return out;
}

}  // namespace rhp
