#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rhp/common.hpp"
#include "rhp/corpus.hpp"

namespace rhp {

// Synthetic review corpus whose helpfulness class is a noisy function of
// reviewer expertise and review age:
//   s = 0.55 u + 0.45 age / age_span + N(0, noise^2),  class = clamp(1 + floor(5 s), 1, 5)
// where u in [0, 1) is the reviewer's latent quality and expertise = 30 u
// votes per review (raised where needed to stay consistent with the
// reviewer's own reviews). Review text is templated around aspect nouns
// and collocations; with probability `text_cue_probability` it also carries
// a class-specific cue word, so text alone is only weakly informative.
struct SyntheticOptions {
  std::size_t reviews = 200;
  std::size_t reviewers = 0;  // 0: reviews / 3 (at least 1)
  std::uint64_t seed = 0;
  Date reference_date{2020, 1, 1};
  int age_span_days = 1825;
  double noise = 0.05;
  double text_cue_probability = 0.25;
  // Fraction of additional zero-vote reviews (kept out of labeling).
  double zero_vote_fraction = 0.1;
};

struct SyntheticCorpus {
  std::vector<ReviewRecord> reviews;
  std::vector<ReviewerProfile> reviewers;
  // Class the generator intended for each labeled review, aligned with `reviews`
  // (0 for zero-vote reviews).
  std::vector<HelpfulnessClass> intended_class;
};

SyntheticCorpus generate_synthetic(const SyntheticOptions& options);

// Writes reviews.jsonl and reviewers.jsonl into `dir`.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace rhp
