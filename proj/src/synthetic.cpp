#include "rhp/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace rhp {

namespace {

constexpr std::array kAspects{"room",  "staff",  "location", "breakfast", "pool",  "view",   "service",
                              "bed",   "bathroom", "price",  "wifi",      "lobby", "shower", "food"};
constexpr std::array kCollocations{"front desk",   "resort fee",  "beach chair", "cable car",   "bed bug",
                                   "room service", "parking lot", "coffee maker", "ice machine", "shuttle bus"};
constexpr std::array kAdjectives{"clean", "small", "nice", "large",  "quiet", "noisy",
                                 "friendly", "old", "modern", "dirty", "great", "fine"};
constexpr std::array kCues{"note", "remark", "summary", "account", "breakdown"};

template <class Array>
const char* pick(Rng& rng, const Array& a) {
  return a[static_cast<std::size_t>(rng.below(a.size()))];
}

std::string make_sentence(Rng& rng) {
  const char* a = pick(rng, kAspects);
  const char* b = pick(rng, kAspects);
  const char* c = pick(rng, kCollocations);
  const char* j = pick(rng, kAdjectives);
  switch (rng.below(6)) {
    case 0: return fmt::format("The {} was {}.", a, j);
    case 1: return fmt::format("We asked the {} about the {}.", c, a);
    case 2: return fmt::format("Our {} had a {} nearby.", a, c);
    case 3: return fmt::format("I liked the {} and the {}.", a, b);
    case 4: return fmt::format("The {} near the {} was {}.", c, a, j);
    default: return fmt::format("There was a {} next to the {}.", c, a);
  }
}

std::string make_text(Rng& rng, HelpfulnessClass cls, double cue_probability) {
  const std::size_t sentences = 2 + static_cast<std::size_t>(rng.below(5));
  std::string text;
  for (std::size_t i = 0; i < sentences; ++i) {
    if (!text.empty()) text.push_back(' ');
    text += make_sentence(rng);
  }
  if (cls >= 1 && rng.uniform() < cue_probability) {
    text += fmt::format(" Here is my {}.", kCues[static_cast<std::size_t>(cls - 1)]);
  }
  return text;
}

HelpfulnessClass class_of(double s) {
  return std::clamp(1 + static_cast<int>(std::floor(5.0 * s)), 1, kNumClasses);
}

long votes_for(Rng& rng, HelpfulnessClass cls) {
  const long lo = 1L << (cls - 1);
  const long hi = cls == kNumClasses ? 40 : (1L << cls) - 1;
  return lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticOptions& o) {
  if (o.reviews == 0) throw DataError("synthetic corpus needs at least one review");
  if (o.age_span_days <= 0) throw DataError("age span must be positive");
  const std::size_t n_reviewers = o.reviewers > 0 ? o.reviewers : std::max<std::size_t>(1, o.reviews / 3);
  Rng rng(derive_seed(o.seed, 0x5197));

  std::vector<double> quality(n_reviewers);
  for (auto& q : quality) q = rng.uniform();

  SyntheticCorpus out;
  std::vector<std::size_t> reviewer_of;
  const auto extra = static_cast<std::size_t>(std::llround(o.zero_vote_fraction * static_cast<double>(o.reviews)));
  for (std::size_t i = 0; i < o.reviews + extra; ++i) {
    const bool labeled = i < o.reviews;
    const std::size_t r = static_cast<std::size_t>(rng.below(n_reviewers));
    const int age = static_cast<int>(rng.below(static_cast<std::uint64_t>(o.age_span_days) + 1));
    ReviewRecord rec;
    rec.review_id = fmt::format("r{:06d}", i);
    rec.reviewer_id = fmt::format("u{:05d}", r);
    rec.posted_at = o.reference_date.plus_days(-age - 1);
    HelpfulnessClass cls = 0;
    if (labeled) {
      const double s = 0.55 * quality[r] + 0.45 * static_cast<double>(age) / o.age_span_days + o.noise * rng.normal();
      cls = class_of(s);
      rec.helpful_votes = votes_for(rng, cls);
    }
    rec.text = make_text(rng, cls, labeled ? o.text_cue_probability : 0.0);
    out.reviews.push_back(std::move(rec));
    out.intended_class.push_back(cls);
    reviewer_of.push_back(r);
  }

  std::vector<long> count(n_reviewers, 0), max_votes(n_reviewers, 0);
  for (std::size_t i = 0; i < out.reviews.size(); ++i) {
    ++count[reviewer_of[i]];
    max_votes[reviewer_of[i]] = std::max(max_votes[reviewer_of[i]], out.reviews[i].helpful_votes);
  }
  for (std::size_t r = 0; r < n_reviewers; ++r) {
    ReviewerProfile p;
    p.reviewer_id = fmt::format("u{:05d}", r);
    p.n_reviews = std::max<long>(1, count[r]) + static_cast<long>(rng.below(20));
    p.m_votes = std::max(std::lround(30.0 * quality[r] * static_cast<double>(p.n_reviews)), max_votes[r]);
    out.reviewers.push_back(p);
  }
  return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::ofstream reviews(dir / "reviews.jsonl", std::ios::trunc);
  std::ofstream reviewers(dir / "reviewers.jsonl", std::ios::trunc);
  if (!reviews || !reviewers) throw IoError("cannot write synthetic corpus under '" + dir.string() + "'");
  for (const auto& r : corpus.reviews) reviews << format_review_line(r) << "\n";
  for (const auto& p : corpus.reviewers) reviewers << format_reviewer_line(p) << "\n";
  if (!reviews || !reviewers) throw IoError("error writing synthetic corpus");
}

}  // namespace rhp
