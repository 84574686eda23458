#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rhp/common.hpp"

namespace rhp {

struct ReviewRecord {
  std::string review_id;
  std::string reviewer_id;
  std::string text;
  long helpful_votes = 0;
  Date posted_at;
};

struct ReviewerProfile {
  std::string reviewer_id;
  long n_reviews = 1;
  long m_votes = 0;
};

// Parse one line of the review / reviewer record formats (one JSON object per
// line; unknown fields ignored). Throw DataError on malformed input.
ReviewRecord parse_review_line(std::string_view line);
ReviewerProfile parse_reviewer_line(std::string_view line);
std::string format_review_line(const ReviewRecord& r);
std::string format_reviewer_line(const ReviewerProfile& p);

struct LoadReport {
  std::size_t malformed_reviews = 0;
  std::size_t malformed_reviewers = 0;
  // Reviews whose reviewer has no profile. Kept in the raw corpus, excluded
  // from labeling.
  std::vector<std::string> missing_reviewer;
  // Reviewers with m_votes below a single attributed review's votes.
  std::vector<std::string> inconsistent_reviewers;
  // First few parse errors, "file:line: message".
  std::vector<std::string> messages;
};

struct RawCorpus {
  std::vector<ReviewRecord> reviews;
  std::map<std::string, ReviewerProfile> reviewers;
  LoadReport report;
  std::unordered_map<std::string, std::size_t> index;

  const ReviewRecord* find_review(const std::string& id) const;
};

// Unreadable files throw IoError; malformed lines are counted, not fatal.
RawCorpus load_corpus(const std::filesystem::path& reviews_path,
                      const std::filesystem::path& reviewers_path);

// Helpfulness class of a positive vote count: min(floor(log2 votes) + 1, 5).
HelpfulnessClass bucket_votes(long helpful_votes);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct SplitOptions {
  SplitRatios ratios;
  std::uint64_t seed = 0;
  bool group_by_reviewer = false;
};

struct LabelingSummary {
  std::size_t total = 0;
  std::size_t zero_votes = 0;
  std::size_t missing_reviewer = 0;
  std::size_t future_dated = 0;
  std::size_t labeled = 0;
};

// Reviews eligible for supervised training: at least one vote, a known
// reviewer and a posting date not after the reference date.
struct LabeledSet {
  std::vector<std::string> ids;
  std::map<std::string, HelpfulnessClass> labels;
  std::map<std::string, std::string> reviewer_of;
  Date reference_date;
  LabelingSummary summary;
};

// reference_date defaults to the latest posted_at plus one day.
LabeledSet label_reviews(const RawCorpus& corpus, std::optional<Date> reference_date = std::nullopt);

struct LabeledCorpus {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
  std::map<std::string, HelpfulnessClass> labels;
  Date reference_date;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  bool grouped_by_reviewer = false;

  std::size_t size() const { return train.size() + valid.size() + test.size(); }
};

// Largest-remainder rounding of n into three parts; ties favour earlier parts.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

LabeledCorpus make_splits(const LabeledSet& labeled, const SplitOptions& options);

struct CorpusManifest {
  std::filesystem::path reviews_path;
  std::filesystem::path reviewers_path;
  LabeledCorpus corpus;
};

std::string manifest_to_string(const CorpusManifest& manifest);
CorpusManifest manifest_from_string(std::string_view text);
void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::filesystem::path& path);

struct SplitStatistics {
  std::size_t samples = 0;
  double avg_sentences = 0.0;
  double avg_words = 0.0;
  std::array<std::size_t, kNumClasses> class_counts{};
};

SplitStatistics split_statistics(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                 const std::vector<std::string>& ids);

}  // namespace rhp
