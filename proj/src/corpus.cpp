#include "rhp/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "rhp/text.hpp"

namespace rhp {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxMessages = 20;
constexpr std::string_view kManifestFormat = "rhp-corpus-manifest";

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key, bool allow_empty) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw DataError(std::string("missing or non-string field '") + key + "'");
  }
  std::string value = it->get<std::string>();
  if (!allow_empty && value.empty()) throw DataError(std::string("empty field '") + key + "'");
  return value;
}

long require_integer(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw DataError(std::string("missing or non-integer field '") + key + "'");
  }
  return it->get<long>();
}

template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    fn(line, number);
  }
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
}

void note(LoadReport& report, const std::filesystem::path& path, std::size_t line,
          const std::string& message) {
  if (report.messages.size() < kMaxMessages) {
    report.messages.push_back(path.filename().string() + ":" + std::to_string(line) + ": " + message);
  }
}

}  // namespace

ReviewRecord parse_review_line(std::string_view line) {
  const json j = parse_object(line);
  ReviewRecord r;
  r.review_id = require_string(j, "review_id", false);
  r.reviewer_id = require_string(j, "reviewer_id", false);
  r.text = require_string(j, "text", true);
  r.helpful_votes = require_integer(j, "helpful_votes");
  if (r.helpful_votes < 0) throw DataError("negative helpful_votes");
  r.posted_at = Date::parse(require_string(j, "posted_at", false));
  return r;
}

ReviewerProfile parse_reviewer_line(std::string_view line) {
  const json j = parse_object(line);
  ReviewerProfile p;
  p.reviewer_id = require_string(j, "reviewer_id", false);
  p.n_reviews = require_integer(j, "n_reviews");
  p.m_votes = require_integer(j, "m_votes");
  if (p.n_reviews < 1) throw DataError("n_reviews must be >= 1");
  if (p.m_votes < 0) throw DataError("negative m_votes");
  return p;
}

std::string format_review_line(const ReviewRecord& r) {
  json j;
  j["review_id"] = r.review_id;
  j["reviewer_id"] = r.reviewer_id;
  j["text"] = r.text;
  j["helpful_votes"] = r.helpful_votes;
  j["posted_at"] = r.posted_at.iso();
  return j.dump();
}

std::string format_reviewer_line(const ReviewerProfile& p) {
  json j;
  j["reviewer_id"] = p.reviewer_id;
  j["n_reviews"] = p.n_reviews;
  j["m_votes"] = p.m_votes;
  return j.dump();
}

const ReviewRecord* RawCorpus::find_review(const std::string& id) const {
  const auto it = index.find(id);
  return it == index.end() ? nullptr : &reviews[it->second];
}

RawCorpus load_corpus(const std::filesystem::path& reviews_path,
                      const std::filesystem::path& reviewers_path) {
  RawCorpus corpus;
  auto& report = corpus.report;

  for_each_line(reviewers_path, [&](const std::string& line, std::size_t number) {
    try {
      ReviewerProfile p = parse_reviewer_line(line);
      if (corpus.reviewers.contains(p.reviewer_id)) {
        throw DataError("duplicate reviewer_id '" + p.reviewer_id + "'");
      }
      corpus.reviewers.emplace(p.reviewer_id, std::move(p));
    } catch (const DataError& e) {
      ++report.malformed_reviewers;
      note(report, reviewers_path, number, e.what());
    }
  });

  for_each_line(reviews_path, [&](const std::string& line, std::size_t number) {
    try {
      ReviewRecord r = parse_review_line(line);
      if (corpus.index.contains(r.review_id)) {
        throw DataError("duplicate review_id '" + r.review_id + "'");
      }
      corpus.index.emplace(r.review_id, corpus.reviews.size());
      corpus.reviews.push_back(std::move(r));
    } catch (const DataError& e) {
      ++report.malformed_reviews;
      note(report, reviews_path, number, e.what());
    }
  });

  std::map<std::string, long> max_votes;
  for (const auto& r : corpus.reviews) {
    if (!corpus.reviewers.contains(r.reviewer_id)) {
      report.missing_reviewer.push_back(r.review_id);
      continue;
    }
    long& mx = max_votes[r.reviewer_id];
    mx = std::max(mx, r.helpful_votes);
  }
  for (const auto& [id, mx] : max_votes) {
    if (corpus.reviewers.at(id).m_votes < mx) report.inconsistent_reviewers.push_back(id);
  }

  if (report.malformed_reviews + report.malformed_reviewers > 0) {
    spdlog::warn("skipped {} malformed review line(s) and {} malformed reviewer line(s)",
                 report.malformed_reviews, report.malformed_reviewers);
  }
  if (!report.missing_reviewer.empty()) {
    spdlog::warn("{} review(s) reference a reviewer without a profile; excluded from labeling",
                 report.missing_reviewer.size());
  }
  if (!report.inconsistent_reviewers.empty()) {
    spdlog::warn("{} reviewer(s) have m_votes below the votes of one of their reviews",
                 report.inconsistent_reviewers.size());
  }
  return corpus;
}

HelpfulnessClass bucket_votes(long helpful_votes) {
  if (helpful_votes < 1) {
    throw DomainError("bucket_votes requires at least one vote, got " + std::to_string(helpful_votes));
  }
  // floor(log2 v) via bit width avoids floating-point edge cases at powers of two.
  const auto v = static_cast<unsigned long>(helpful_votes);
  const int floor_log2 = static_cast<int>(std::bit_width(v)) - 1;
  return std::min(floor_log2 + 1, kNumClasses);
}

LabeledSet label_reviews(const RawCorpus& corpus, std::optional<Date> reference_date) {
  LabeledSet out;
  if (reference_date) {
    out.reference_date = *reference_date;
  } else if (!corpus.reviews.empty()) {
    Date latest = corpus.reviews.front().posted_at;
    for (const auto& r : corpus.reviews) latest = std::max(latest, r.posted_at);
    out.reference_date = latest.plus_days(1);
  }
  out.summary.total = corpus.reviews.size();
  for (const auto& r : corpus.reviews) {
    if (r.helpful_votes < 1) {
      ++out.summary.zero_votes;
      continue;
    }
    if (!corpus.reviewers.contains(r.reviewer_id)) {
      ++out.summary.missing_reviewer;
      continue;
    }
    if (r.posted_at > out.reference_date) {
      ++out.summary.future_dated;
      continue;
    }
    out.ids.push_back(r.review_id);
    out.labels.emplace(r.review_id, bucket_votes(r.helpful_votes));
    out.reviewer_of.emplace(r.review_id, r.reviewer_id);
  }
  out.summary.labeled = out.ids.size();
  if (out.summary.future_dated > 0) {
    spdlog::warn("{} review(s) posted after the reference date {}; excluded from labeling",
                 out.summary.future_dated, out.reference_date.iso());
  }
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  const std::array<double, 3> r{ratios.train, ratios.valid, ratios.test};
  for (double x : r) {
    if (!(x >= 0.0)) throw DataError("split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw DataError("split ratios must sum to 1");

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += sizes[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++sizes[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return sizes;
}

LabeledCorpus make_splits(const LabeledSet& labeled, const SplitOptions& options) {
  const std::size_t n = labeled.ids.size();
  if (n < 3) {
    throw DataError("need at least 3 labeled reviews to build train/valid/test splits, have " +
                    std::to_string(n));
  }
  const auto sizes = split_sizes(n, options.ratios);

  LabeledCorpus out;
  out.labels = labeled.labels;
  out.reference_date = labeled.reference_date;
  out.seed = options.seed;
  out.ratios = options.ratios;
  out.grouped_by_reviewer = options.group_by_reviewer;

  std::vector<std::string> ids = labeled.ids;
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_seed(options.seed, 0x5e17));

  if (!options.group_by_reviewer) {
    rng.shuffle(std::span<std::string>(ids));
    out.train.assign(ids.begin(), ids.begin() + sizes[0]);
    out.valid.assign(ids.begin() + sizes[0], ids.begin() + sizes[0] + sizes[1]);
    out.test.assign(ids.begin() + sizes[0] + sizes[1], ids.end());
    return out;
  }

  // Whole reviewers go to one split; quotas are filled in order train, valid, test.
  std::map<std::string, std::vector<std::string>> by_reviewer;
  for (const auto& id : ids) by_reviewer[labeled.reviewer_of.at(id)].push_back(id);
  std::vector<std::string> reviewers;
  for (const auto& [reviewer, _] : by_reviewer) reviewers.push_back(reviewer);
  rng.shuffle(std::span<std::string>(reviewers));
  for (const auto& reviewer : reviewers) {
    auto& dst = out.train.size() < sizes[0]                       ? out.train
                : out.valid.size() < sizes[1] || sizes[2] == 0 ? out.valid
                                                                   : out.test;
    const auto& items = by_reviewer[reviewer];
    dst.insert(dst.end(), items.begin(), items.end());
  }
  return out;
}

std::string manifest_to_string(const CorpusManifest& manifest) {
  const auto& c = manifest.corpus;
  json j;
  j["format"] = kManifestFormat;
  j["version"] = 1;
  j["sources"] = {{"reviews", manifest.reviews_path.string()},
                  {"reviewers", manifest.reviewers_path.string()}};
  j["seed"] = c.seed;
  j["ratios"] = {c.ratios.train, c.ratios.valid, c.ratios.test};
  j["grouped_by_reviewer"] = c.grouped_by_reviewer;
  j["reference_date"] = c.reference_date.iso();
  j["splits"] = {{"train", c.train}, {"valid", c.valid}, {"test", c.test}};
  json labels = json::object();
  for (const auto& [id, label] : c.labels) labels[id] = label;
  j["labels"] = std::move(labels);
  return j.dump(2) + "\n";
}

CorpusManifest manifest_from_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("corpus manifest is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != kManifestFormat) throw DataError("not a corpus manifest");
  try {
    CorpusManifest m;
    m.reviews_path = j.at("sources").at("reviews").get<std::string>();
    m.reviewers_path = j.at("sources").at("reviewers").get<std::string>();
    auto& c = m.corpus;
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto ratios = j.at("ratios").get<std::vector<double>>();
    if (ratios.size() != 3) throw DataError("manifest ratios must have three entries");
    c.ratios = {ratios[0], ratios[1], ratios[2]};
    c.grouped_by_reviewer = j.at("grouped_by_reviewer").get<bool>();
    c.reference_date = Date::parse(j.at("reference_date").get<std::string>());
    c.train = j.at("splits").at("train").get<std::vector<std::string>>();
    c.valid = j.at("splits").at("valid").get<std::vector<std::string>>();
    c.test = j.at("splits").at("test").get<std::vector<std::string>>();
    for (const auto& [id, label] : j.at("labels").items()) {
      const int value = label.get<int>();
      if (!is_valid_class(value)) throw DataError("label out of range for '" + id + "'");
      c.labels.emplace(id, value);
    }
    std::set<std::string> seen;
    for (const auto* split : {&c.train, &c.valid, &c.test}) {
      for (const auto& id : *split) {
        if (!seen.insert(id).second) throw DataError("review '" + id + "' appears in two splits");
        if (!c.labels.contains(id)) throw DataError("review '" + id + "' has no label");
      }
    }
    if (seen.size() != c.labels.size()) throw DataError("labels and splits disagree");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed corpus manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << manifest_to_string(manifest);
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_string(ss.str());
}

SplitStatistics split_statistics(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                 const std::vector<std::string>& ids) {
  SplitStatistics stats;
  double sentences = 0, words = 0;
  for (const auto& id : ids) {
    const ReviewRecord* r = corpus.find_review(id);
    if (r == nullptr) throw DataError("review '" + id + "' missing from raw corpus");
    sentences += static_cast<double>(text::split_sentences(r->text).size());
    words += static_cast<double>(text::count_words(r->text));
    ++stats.class_counts[labeled.labels.at(id) - 1];
    ++stats.samples;
  }
  if (stats.samples > 0) {
    stats.avg_sentences = sentences / static_cast<double>(stats.samples);
    stats.avg_words = words / static_cast<double>(stats.samples);
  }
  return stats;
}

}  // namespace rhp
