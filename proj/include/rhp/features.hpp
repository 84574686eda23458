#pragma once

#include <span>
#include <string>
#include <vector>

#include "rhp/common.hpp"
#include "rhp/corpus.hpp"

namespace rhp {

// Mean helpful votes per review, m / n. n = 0 is a DomainError.
double expertise_score(long m_votes, long n_reviews);

// Whole days from posting to the reference date. posted_at after the
// reference date is a DomainError.
double review_age_days(const Date& posted_at, const Date& reference_date);

struct TargetRange {
  double a = 0.0;
  double b = 1.0;
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

// Min-max statistics fitted on the training split.
struct FeatureStats {
  FeatureRange expertise;
  FeatureRange age_days;
  TargetRange range;
};

struct ExampleFeatures {
  double expertise_raw = 0.0;
  double age_days_raw = 0.0;
  double expertise_norm = 0.0;
  double age_norm = 0.0;
};

// Maps x from [min, max] onto [a, b]; values outside are clamped and a
// degenerate range (max == min) maps everything to a.
double normalize(double x, const FeatureRange& stats, const TargetRange& range = {});
double denormalize(double z, const FeatureRange& stats, const TargetRange& range = {});

// Raw feature values only; normalized fields are left at zero.
ExampleFeatures raw_features(const ReviewRecord& review, const ReviewerProfile& reviewer,
                             const Date& reference_date);

// Componentwise min/max over the given (training) examples. Throws DataError
// on an empty set or an invalid target range.
FeatureStats fit_stats(std::span<const ExampleFeatures> train, const TargetRange& range = {});

void apply_stats(const FeatureStats& stats, ExampleFeatures& features);

}  // namespace rhp
