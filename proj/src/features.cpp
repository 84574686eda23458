#include "rhp/features.hpp"

#include <algorithm>

namespace rhp {

double expertise_score(long m_votes, long n_reviews) {
  if (n_reviews <= 0) {
    throw DomainError("expertise_score requires n_reviews >= 1, got " + std::to_string(n_reviews));
  }
  if (m_votes < 0) throw DomainError("expertise_score requires m_votes >= 0");
  return static_cast<double>(m_votes) / static_cast<double>(n_reviews);
}

double review_age_days(const Date& posted_at, const Date& reference_date) {
  const long days = reference_date.days_since(posted_at);
  if (days < 0) {
    throw DomainError("review posted " + posted_at.iso() + " after the reference date " +
                      reference_date.iso());
  }
  return static_cast<double>(days);
}

double normalize(double x, const FeatureRange& stats, const TargetRange& range) {
  if (stats.max <= stats.min) return range.a;
  const double clamped = std::clamp(x, stats.min, stats.max);
  const double z = (range.b - range.a) * (clamped - stats.min) / (stats.max - stats.min) + range.a;
  return std::clamp(z, range.a, range.b);
}

double denormalize(double z, const FeatureRange& stats, const TargetRange& range) {
  return (z - range.a) * (stats.max - stats.min) / (range.b - range.a) + stats.min;
}

ExampleFeatures raw_features(const ReviewRecord& review, const ReviewerProfile& reviewer,
                             const Date& reference_date) {
  ExampleFeatures f;
  f.expertise_raw = expertise_score(reviewer.m_votes, reviewer.n_reviews);
  f.age_days_raw = review_age_days(review.posted_at, reference_date);
  return f;
}

FeatureStats fit_stats(std::span<const ExampleFeatures> train, const TargetRange& range) {
  if (train.empty()) throw DataError("cannot fit feature statistics on an empty training split");
  if (!(range.a < range.b)) throw DataError("normalization range requires a < b");
  FeatureStats stats;
  stats.range = range;
  stats.expertise = {train.front().expertise_raw, train.front().expertise_raw};
  stats.age_days = {train.front().age_days_raw, train.front().age_days_raw};
  for (const auto& f : train) {
    stats.expertise.min = std::min(stats.expertise.min, f.expertise_raw);
    stats.expertise.max = std::max(stats.expertise.max, f.expertise_raw);
    stats.age_days.min = std::min(stats.age_days.min, f.age_days_raw);
    stats.age_days.max = std::max(stats.age_days.max, f.age_days_raw);
  }
  return stats;
}

void apply_stats(const FeatureStats& stats, ExampleFeatures& features) {
  features.expertise_norm = normalize(features.expertise_raw, stats.expertise, stats.range);
  features.age_norm = normalize(features.age_days_raw, stats.age_days, stats.range);
}

}  // namespace rhp
