#pragma once

#include <span>
#include <string>
#include <vector>

#include "rhp/corpus.hpp"
#include "rhp/features.hpp"
#include "rhp/kernels.hpp"
#include "rhp/model.hpp"
#include "rhp/tokenizer.hpp"

namespace rhp {

// Model-ready splits with the feature statistics fitted on the train split.
struct Dataset {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> valid;
  std::vector<LabeledExample> test;
  FeatureStats stats;
};

// Raw (unnormalized) features of the given labeled reviews, in order.
std::vector<ExampleFeatures> collect_features(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                              std::span<const std::string> ids);

// Tokenizes and normalizes the given reviews with fixed statistics.
std::vector<LabeledExample> build_examples(const RawCorpus& corpus, const LabeledCorpus& labeled,
                                           std::span<const std::string> ids, const FeatureStats& stats,
                                           const WordPieceTokenizer& tokenizer, std::size_t max_len,
                                           Exec exec = Exec::parallel);

// Fits statistics on the train split and builds all three splits.
Dataset build_dataset(const RawCorpus& corpus, const LabeledCorpus& labeled, const WordPieceTokenizer& tokenizer,
                      std::size_t max_len, const TargetRange& range = {}, Exec exec = Exec::parallel);

// Texts of the given reviews, for building a vocabulary.
std::vector<std::string> review_texts(const RawCorpus& corpus, std::span<const std::string> ids);

}  // namespace rhp
