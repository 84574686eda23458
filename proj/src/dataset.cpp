#include "rhp/dataset.hpp"

namespace rhp {

namespace {

const ReviewRecord& require_review(const RawCorpus& corpus, const std::string& id) {
  const ReviewRecord* r = corpus.find_review(id);
  if (r == nullptr) throw DataError("review '" + id + "' is in the manifest but not in the corpus");
  return *r;
}

const ReviewerProfile& require_reviewer(const RawCorpus& corpus, const ReviewRecord& r) {
  const auto it = corpus.reviewers.find(r.reviewer_id);
  if (it == corpus.reviewers.end()) {
    throw DataError("review '" + r.review_id + "' references unknown reviewer '" + r.reviewer_id + "'");
  }
  return it->second;
}

}  // namespace

std::vector<ExampleFeatures> collect_features(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                              std::span<const std::string> ids) {
  std::vector<ExampleFeatures> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto& r = require_review(corpus, id);
    out.push_back(raw_features(r, require_reviewer(corpus, r), labeled.reference_date));
  }
  return out;
}

std::vector<LabeledExample> build_examples(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                           std::span<const std::string> ids, const FeatureStats& stats,
                                           const WordPieceTokenizer& tokenizer, std::size_t max_len,
                                           Exec exec) {
  auto features = collect_features(corpus, labeled, ids);
  std::vector<LabeledExample> out(ids.size());
  kernels::for_each_index(exec, ids.size(), [&](std::size_t i) {
    const auto& r = require_review(corpus, ids[i]);
    const auto label = labeled.labels.find(ids[i]);
    if (label == labeled.labels.end()) throw DataError("review '" + ids[i] + "' has no label");
    apply_stats(stats, features[i]);
    auto& ex = out[i];
    ex.review_id = ids[i];
    ex.tokens = tokenizer.tokenize(r.text, max_len);
    ex.expertise_norm = features[i].expertise_norm;
    ex.age_norm = features[i].age_norm;
    ex.label = label->second;
  });
  return out;
}

Dataset build_dataset(const RawCorpus& corpus, const LabeledCorpus& labeled, const WordPieceTokenizer& tokenizer,
                      std::size_t max_len, const TargetRange& range, Exec exec) {
  Dataset d;
  d.stats = fit_stats(collect_features(corpus, labeled, labeled.train), range);
  d.train = build_examples(corpus, labeled, labeled.train, d.stats, tokenizer, max_len, exec);
  d.valid = build_examples(corpus, labeled, labeled.valid, d.stats, tokenizer, max_len, exec);
  d.test = build_examples(corpus, labeled, labeled.test, d.stats, tokenizer, max_len, exec);
  return d;
}

std::vector<std::string> review_texts(const RawCorpus& corpus, std::span<const std::string> ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(require_review(corpus, id).text);
  return out;
}

}  // namespace rhp
