#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "rhp/common.hpp"
#include "rhp/corpus.hpp"
#include "rhp/kernels.hpp"

namespace rhp {

struct CandidateToken {
  std::string surface;
  std::string lemma;
  std::string pos_tag;
  bool is_noun = false;
  double sentiment_valence = 0.0;
};

// Penn Treebank style tagger over one tokenized sentence.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<std::string> tag(std::span<const std::string> words) const = 0;
};

// Closed-class word lists, a small open-class lexicon, suffix rules and a
// few contextual corrections. Adequate for aspect extraction, not a
// general-purpose tagger.
class RuleBasedTagger final : public PosTagger {
 public:
  RuleBasedTagger();
  std::vector<std::string> tag(std::span<const std::string> words) const override;

 private:
  std::string lexical_tag(const std::string& word) const;
  std::unordered_map<std::string, std::string> lexicon_;
};

class Lemmatizer {
 public:
  virtual ~Lemmatizer() = default;
  virtual std::string lemmatize(const std::string& word, const std::string& pos_tag) const = 0;
};

// Plural-to-singular rules for nouns (irregular forms first); other parts of
// speech are returned unchanged.
class RuleBasedLemmatizer final : public Lemmatizer {
 public:
  std::string lemmatize(const std::string& word, const std::string& pos_tag) const override;
};

// Term -> valence table loaded from "term<TAB>valence" lines ('#' comments).
class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  explicit SentimentLexicon(std::unordered_map<std::string, double> entries) : entries_(std::move(entries)) {}
  static SentimentLexicon load(const std::filesystem::path& path);

  // 0 when absent.
  double valence(std::string_view term) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, double> entries_;
};

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}
  // One word per line; '#' comments.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  void add(std::string word) { words_.insert(std::move(word)); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

inline const std::vector<std::string>& default_domain_stopwords() {
  static const std::vector<std::string> words{"hotel", "restaurant"};
  return words;
}

struct AnalysisResources {
  std::shared_ptr<const PosTagger> tagger;
  std::shared_ptr<const Lemmatizer> lemmatizer;
  SentimentLexicon lexicon;
  StopwordList stopwords;
  std::vector<std::string> domain_stopwords = default_domain_stopwords();

  // Bundled tagger and lemmatizer with lexicon/stopword files. Missing
  // files throw IoError.
  static AnalysisResources load(const std::filesystem::path& lexicon_path,
                                const std::filesystem::path& stopwords_path);
};

std::filesystem::path default_lexicon_path();
std::filesystem::path default_stopwords_path();

// Sentence split, word tokenization, tagging, lowercasing and
// lemmatization; stopwords (general and domain, checked on the surface form
// and the lemma) and punctuation-only tokens are dropped.
std::vector<std::vector<CandidateToken>> preprocess(std::string_view text, const AnalysisResources& res);

// Nouns (NN/NNS) with zero sentiment valence and no emoji code points.
std::vector<CandidateToken> filter_candidates(std::span<const CandidateToken> tokens);

struct RankedNgram {
  std::string ngram;  // bigram words joined by a single space
  double score = 0.0;
  std::size_t count = 0;

  friend bool operator==(const RankedNgram&, const RankedNgram&) = default;
};

// Candidate lemma sequences of one class, one vector per sentence.
using ClassSentences = std::vector<std::vector<std::string>>;

// Descending frequency, ties lexicographic.
std::vector<RankedNgram> rank_unigrams(const ClassSentences& sentences, std::size_t k);

// Dunning log-likelihood ratio -2 log(lambda) under binomial likelihoods for
// a bigram with joint count c12, first-word count c1, second-word count c2
// and N tokens.
double likelihood_ratio(double c12, double c1, double c2, double n);

// Within-sentence bigrams with joint count >= min_freq, by descending
// likelihood ratio (ties lexicographic). N is the number of tokens.
std::vector<RankedNgram> rank_bigrams(const ClassSentences& sentences, std::size_t k, std::size_t min_freq);

inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::size_t kDefaultBigramMinFreq = 5;

struct NgramReport {
  std::array<std::vector<RankedNgram>, kNumClasses> unigrams;
  std::array<std::vector<RankedNgram>, kNumClasses> bigrams;
  // n-gram -> classes (1..5) whose top-K list contains it
  std::map<std::string, std::set<int>> unigram_overlap;
  std::map<std::string, std::set<int>> bigram_overlap;

  nlohmann::json to_json() const;
};

std::map<std::string, std::set<int>> overlap_map(const std::array<std::vector<RankedNgram>, kNumClasses>& lists);

NgramReport overlap_report(std::array<std::vector<RankedNgram>, kNumClasses> unigrams,
                           std::array<std::vector<RankedNgram>, kNumClasses> bigrams);

struct AnalysisOptions {
  std::size_t top_k = kDefaultTopK;
  std::size_t min_freq = kDefaultBigramMinFreq;
  // Reviews sampled per class; all when unset.
  std::optional<std::size_t> sample_per_class;
  std::uint64_t seed = 0;
};

// Candidate sentences per class for the given labeled reviews.
std::array<ClassSentences, kNumClasses> class_candidates(const RawCorpus& corpus,
                                                         const std::map<std::string, HelpfulnessClass>& labels,
                                                         std::span<const std::string> ids,
                                                         const AnalysisResources& res, const AnalysisOptions& options,
                                                         Exec exec = Exec::parallel);

NgramReport analyze(const std::array<ClassSentences, kNumClasses>& per_class, const AnalysisOptions& options,
                    Exec exec = Exec::parallel);

// Classes as columns, unigram rows then bigram rows. Entries shared by
// several classes carry their overlap count, e.g. "room (5)".
std::string render_ngram_table(const NgramReport& report);

}  // namespace rhp
