#include "rhp/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "rhp/common.hpp"
#include "rhp/text.hpp"

namespace rhp {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    // First occurrence wins, as in HF vocab loading.
    index_.emplace(tokens_[i], static_cast<int>(i));
  }
  pad_ = find(kPadToken);
  unk_ = find(kUnkToken);
  cls_ = find(kClsToken);
  sep_ = find(kSepToken);
  if (pad_ < 0 || unk_ < 0 || cls_ < 0 || sep_ < 0) {
    throw DataError("vocabulary must contain [PAD], [UNK], [CLS] and [SEP]");
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary '" + path.string() + "'");
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw IoError("error writing vocabulary '" + path.string() + "'");
}

Vocabulary Vocabulary::build(std::span<const std::string> texts, bool lowercase, std::size_t min_count,
                             std::size_t max_size) {
  std::map<std::string, std::size_t> word_counts;
  std::set<std::string> chars;
  for (const auto& t : texts) {
    for (auto& word : text::basic_tokenize(t, lowercase)) {
      for (char32_t cp : text::decode_utf8(word)) chars.insert(text::encode_utf8(std::u32string(1, cp)));
      ++word_counts[word];
    }
  }
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken),
                                  std::string(kClsToken), std::string(kSepToken),
                                  std::string(kMaskToken)};
  std::set<std::string> present(tokens.begin(), tokens.end());
  auto push = [&](const std::string& t) {
    if (tokens.size() < max_size && present.insert(t).second) tokens.push_back(t);
  };
  for (const auto& c : chars) push(c);
  for (const auto& c : chars) push(std::string(kContinuationPrefix) + c);

  std::vector<std::pair<std::string, std::size_t>> words(word_counts.begin(), word_counts.end());
  std::stable_sort(words.begin(), words.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  for (const auto& [word, count] : words) {
    if (count < min_count) break;
    push(word);
  }
  return Vocabulary(std::move(tokens));
}

int Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

WordPieceTokenizer::WordPieceTokenizer(Vocabulary vocab, bool lowercase, std::size_t max_chars_per_word)
    : vocab_(std::move(vocab)), lowercase_(lowercase), max_chars_per_word_(max_chars_per_word) {}

std::vector<std::string> WordPieceTokenizer::split_word(std::string_view word) const {
  const std::u32string cps = text::decode_utf8(word);
  if (cps.size() > max_chars_per_word_) return {std::string(kUnkToken)};
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::string match;
    while (start < end) {
      std::string candidate = text::encode_utf8(cps.substr(start, end - start));
      if (start > 0) candidate.insert(0, kContinuationPrefix);
      if (vocab_.find(candidate) >= 0) {
        match = std::move(candidate);
        break;
      }
      --end;
    }
    if (match.empty()) return {std::string(kUnkToken)};
    pieces.push_back(std::move(match));
    start = end;
  }
  return pieces;
}

TokenizedReview WordPieceTokenizer::tokenize(std::string_view text, std::size_t max_len) const {
  if (max_len < 2) throw DomainError("max_len must leave room for [CLS] and [SEP]");
  TokenizedReview out;
  out.ids.push_back(vocab_.cls_id());
  out.pieces.emplace_back(kClsToken);
  out.word_index.push_back(-1);

  const auto words = text::basic_tokenize(text, lowercase_);
  out.degenerate = words.empty();
  const std::size_t budget = max_len - 2;
  std::size_t used = 0;
  for (std::size_t w = 0; w < words.size() && !out.truncated; ++w) {
    for (auto& piece : split_word(words[w])) {
      if (used == budget) {
        out.truncated = true;
        break;
      }
      out.ids.push_back(vocab_.find(piece));
      out.pieces.push_back(std::move(piece));
      out.word_index.push_back(static_cast<int>(w));
      ++used;
    }
  }
  out.ids.push_back(vocab_.sep_id());
  out.pieces.emplace_back(kSepToken);
  out.word_index.push_back(-1);
  return out;
}

}  // namespace rhp
