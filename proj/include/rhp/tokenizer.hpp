#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rhp {

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kMaskToken = "[MASK]";
inline constexpr std::string_view kContinuationPrefix = "##";

// Token string <-> id table in vocab.txt layout (one token per line, id is
// the line index). The five special tokens must be present.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Vocabulary for the hash encoder: specials, every character seen (both as
  // word start and as "##" continuation), then whole words with frequency
  // >= min_count in descending frequency order (ties lexicographic), capped
  // at max_size entries overall.
  static Vocabulary build(std::span<const std::string> texts, bool lowercase, std::size_t min_count,
                          std::size_t max_size);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  // -1 when absent.
  int find(std::string_view token) const;
  bool contains_id(int id) const { return id >= 0 && static_cast<std::size_t>(id) < tokens_.size(); }

  int pad_id() const { return pad_; }
  int unk_id() const { return unk_; }
  int cls_id() const { return cls_; }
  int sep_id() const { return sep_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int pad_ = -1, unk_ = -1, cls_ = -1, sep_ = -1;
};

struct TokenizedReview {
  std::vector<int> ids;
  // Surface form of each token ("##" kept on continuation pieces).
  std::vector<std::string> pieces;
  // Index of the source word for each token; -1 for the markers.
  std::vector<int> word_index;
  bool degenerate = false;
  bool truncated = false;

  std::size_t size() const { return ids.size(); }
};

// WordPiece tokenizer: basic tokenization followed by greedy
// longest-match-first subword splitting. Output is
// [CLS] pieces... [SEP], truncated to max_len with [SEP] kept.
class WordPieceTokenizer {
 public:
  WordPieceTokenizer() = default;
  WordPieceTokenizer(Vocabulary vocab, bool lowercase, std::size_t max_chars_per_word = 100);

  TokenizedReview tokenize(std::string_view text, std::size_t max_len) const;
  std::vector<std::string> split_word(std::string_view word) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  bool lowercase() const { return lowercase_; }

 private:
  Vocabulary vocab_;
  bool lowercase_ = true;
  std::size_t max_chars_per_word_ = 100;
};

}  // namespace rhp
