#pragma once

#include <string>
#include <string_view>
#include <vector>

// Unicode-light text utilities shared by the corpus statistics, the subword
// tokenizer and the aspect-analysis pipeline. Case folding and accent
// stripping cover Latin-1, Latin Extended-A, basic Greek and Cyrillic.
namespace rhp::text {

// Invalid byte sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
bool is_control(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_cjk(char32_t cp);
bool is_emoji(char32_t cp);
bool is_combining_mark(char32_t cp);
bool is_alnum(char32_t cp);

char32_t to_lower(char32_t cp);
// Base letter of an accented lowercase letter, or cp itself.
char32_t strip_accent(char32_t cp);

std::string trim(std::string_view s);
std::string to_lower(std::string_view utf8);

// Splits on sentence-final punctuation followed by whitespace, and on line
// breaks. Returned sentences are trimmed and non-empty.
std::vector<std::string> split_sentences(std::string_view text);

// Whitespace-separated tokens containing at least one letter or digit.
std::size_t count_words(std::string_view text);

// BERT-style basic tokenization: drop control characters, optionally
// lowercase and strip accents, isolate CJK ideographs, then split on
// whitespace and punctuation (each punctuation character is its own token).
std::vector<std::string> basic_tokenize(std::string_view text, bool lowercase);

// Word tokenization for aspect analysis: runs of letters/digits/apostrophes,
// punctuation and emoji as single-character tokens, English clitics
// ('s, n't, 're, 've, 'll, 'd, 'm) split off.
std::vector<std::string> word_tokenize(std::string_view sentence);

}  // namespace rhp::text
