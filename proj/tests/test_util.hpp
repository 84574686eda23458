#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "rhp/common.hpp"
#include "rhp/encoder.hpp"
#include "rhp/model.hpp"
#include "rhp/tokenizer.hpp"
#include "rhp/transformer.hpp"

namespace rhp::testing {

inline const std::vector<std::string>& sample_texts() {
  static const std::vector<std::string> texts{
      "The room was clean and the staff were friendly.",
      "Great stay, great pool, the breakfast was excellent!",
      "Terrible service at the front desk; the resort fee was a surprise.",
      "We loved the view from our balcony and the quiet street.",
      "The bathroom was dirty and the shower barely worked.",
      "Location is perfect, close to the beach and the cable car.",
  };
  return texts;
}

inline WordPieceTokenizer sample_tokenizer() {
  return WordPieceTokenizer(Vocabulary::build(sample_texts(), true, 1, 1000), true);
}

inline std::shared_ptr<HashEncoder> small_hash_encoder(std::size_t embedding_dim = 8, std::size_t output_dim = 6) {
  return std::make_shared<HashEncoder>(sample_tokenizer(), HashEncoder::Options{embedding_dim, output_dim, 0x5EED});
}

inline TransformerConfig tiny_transformer_config(std::size_t vocab_size) {
  TransformerConfig c;
  c.vocab_size = vocab_size;
  c.hidden_size = 8;
  c.num_layers = 2;
  c.num_heads = 2;
  c.intermediate_size = 12;
  c.max_positions = 32;
  c.layer_norm_eps = 1e-12;
  return c;
}

inline std::shared_ptr<TransformerEncoder> tiny_transformer(std::size_t output_dim = 6) {
  auto tok = sample_tokenizer();
  const auto config = tiny_transformer_config(tok.vocabulary().size());
  return std::make_shared<TransformerEncoder>(std::move(tok), config, output_dim);
}

// Review with 1..max_tokens tokens (markers included) drawn from the sample vocabulary.
inline LabeledExample random_example(const TextEncoder& encoder, Rng& rng, std::size_t max_tokens = 16) {
  const auto& vocab = encoder.tokenizer().vocabulary();
  const std::size_t content = 1 + static_cast<std::size_t>(rng.below(max_tokens - 2));
  LabeledExample ex;
  ex.review_id = fmt::format("x{}", rng.below(1000000));
  ex.tokens.ids.push_back(vocab.cls_id());
  ex.tokens.pieces.push_back("[CLS]");
  ex.tokens.word_index.push_back(-1);
  for (std::size_t i = 0; i < content; ++i) {
    int id = 0;
    do {
      id = static_cast<int>(rng.below(vocab.size()));
    } while (id == vocab.pad_id() || id == vocab.cls_id() || id == vocab.sep_id());
    ex.tokens.ids.push_back(id);
    ex.tokens.pieces.push_back(vocab.token(id));
    ex.tokens.word_index.push_back(static_cast<int>(i));
  }
  ex.tokens.ids.push_back(vocab.sep_id());
  ex.tokens.pieces.push_back("[SEP]");
  ex.tokens.word_index.push_back(-1);
  ex.expertise_norm = rng.uniform();
  ex.age_norm = rng.uniform();
  ex.label = 1 + static_cast<int>(rng.below(kNumClasses));
  return ex;
}

// Relative difference; magnitudes below `floor` are compared absolutely so
// that finite-difference noise on near-zero gradients does not dominate.
inline double relative_error(double analytic, double numeric, double floor = 1e-3) {
  return std::abs(analytic - numeric) / std::max({floor, std::abs(analytic), std::abs(numeric)});
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("rhp_{}_{}_{}", tag, ::getpid(), counter()++);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rhp::testing
