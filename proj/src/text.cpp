#include "rhp/text.hpp"

#include <algorithm>
#include <array>

namespace rhp::text {

namespace {

// Base letters for U+0100..U+017F after lowercasing; '.' means no decomposition.
constexpr std::string_view kLatinExtABase =
    "aaaaaa" "cccccccc" "dd" ".." "eeeeeeeeee" "gggggggg" "hh" ".." "iiiiiiii" "i" "." ".."
    "jj" "kk" "." "llllll" "...." "nnnnnn" "..." "oooooo" ".." "rrrrrr" "ssssssss" "tttt" ".."
    "uuuuuuuuuuuu" "ww" "yyy" "zzzzzz" ".";
static_assert(kLatinExtABase.size() == 128);

// Base letters for U+00E0..U+00FF.
constexpr std::string_view kLatin1LowerBase = "aaaaaa.ceeeeiiii.nooooo..uuuuy.y";
static_assert(kLatin1LowerBase.size() == 32);

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > bytes.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

bool is_whitespace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0 || cp == 0x1680 ||
         in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

bool is_control(char32_t cp) {
  if (cp == '\t' || cp == '\n' || cp == '\r') return false;
  return cp < 0x20 || in(cp, 0x7F, 0x9F) || in(cp, 0x200B, 0x200C) || in(cp, 0x200E, 0x200F) ||
         in(cp, 0x202A, 0x202E) || cp == 0xFEFF || cp == 0xFFFD;
}

bool is_punctuation(char32_t cp) {
  if (in(cp, 33, 47) || in(cp, 58, 64) || in(cp, 91, 96) || in(cp, 123, 126)) return true;
  return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 || cp == 0xBB ||
         cp == 0xBF || in(cp, 0x2010, 0x2027) || in(cp, 0x2030, 0x205E) || in(cp, 0x3001, 0x3003) ||
         in(cp, 0x3008, 0x3011) || in(cp, 0x3014, 0x301F) || in(cp, 0xFF01, 0xFF0F) ||
         in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65);
}

bool is_cjk(char32_t cp) {
  return in(cp, 0x4E00, 0x9FFF) || in(cp, 0x3400, 0x4DBF) || in(cp, 0x20000, 0x2A6DF) ||
         in(cp, 0x2A700, 0x2B73F) || in(cp, 0x2B740, 0x2B81F) || in(cp, 0x2B820, 0x2CEAF) ||
         in(cp, 0xF900, 0xFAFF) || in(cp, 0x2F800, 0x2FA1F);
}

bool is_emoji(char32_t cp) {
  return in(cp, 0x1F000, 0x1FAFF) || in(cp, 0x2600, 0x27BF) || in(cp, 0x2300, 0x23FF) ||
         in(cp, 0x2B00, 0x2BFF) || in(cp, 0xFE00, 0xFE0F) || cp == 0x200D ||
         in(cp, 0xE0020, 0xE007F);
}

bool is_combining_mark(char32_t cp) {
  return in(cp, 0x300, 0x36F) || in(cp, 0x1AB0, 0x1AFF) || in(cp, 0x1DC0, 0x1DFF) ||
         in(cp, 0x20D0, 0x20FF) || in(cp, 0xFE20, 0xFE2F);
}

bool is_alnum(char32_t cp) {
  if (cp < 0x80) return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  if (is_whitespace(cp) || is_control(cp) || is_punctuation(cp) || is_emoji(cp) ||
      is_combining_mark(cp)) {
    return false;
  }
  return cp != 0xD7 && cp != 0xF7 && !in(cp, 0xA2, 0xBF);
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
  if (in(cp, 0x100, 0x17F)) {
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    const bool even_start = in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177);
    const bool odd_start = in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E);
    if (even_start && cp % 2 == 0) return cp + 1;
    if (odd_start && cp % 2 == 1) return cp + 1;
    return cp;
  }
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
  if (in(cp, 0x410, 0x42F)) return cp + 32;
  if (in(cp, 0x400, 0x40F)) return cp + 80;
  return cp;
}

char32_t strip_accent(char32_t cp) {
  if (in(cp, 0xE0, 0xFF)) {
    const char base = kLatin1LowerBase[cp - 0xE0];
    return base == '.' ? cp : static_cast<char32_t>(base);
  }
  if (in(cp, 0xC0, 0xDE)) {
    const char32_t lower = strip_accent(cp + 32);
    return lower == cp + 32 ? cp : lower - 32;
  }
  if (in(cp, 0x100, 0x17F)) {
    const char base = kLatinExtABase[cp - 0x100];
    if (base == '.') return cp;
    const char32_t lower = to_lower(cp);
    return lower == cp ? static_cast<char32_t>(base) : static_cast<char32_t>(base - 32);
  }
  return cp;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

std::string to_lower(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (char32_t cp : decode_utf8(utf8)) append_utf8(out, to_lower(cp));
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const std::u32string cps = decode_utf8(text);
  std::vector<std::string> out;
  std::u32string current;
  auto flush = [&] {
    std::string s = trim(encode_utf8(current));
    if (!s.empty()) out.push_back(std::move(s));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (cp == '\n' || cp == 0x2028 || cp == 0x2029) {
      flush();
      continue;
    }
    current.push_back(cp);
    if (cp == '.' || cp == '!' || cp == '?') {
      // Absorb runs like "!!" or "?!" and closing quotes/brackets.
      while (i + 1 < cps.size() &&
             (cps[i + 1] == '.' || cps[i + 1] == '!' || cps[i + 1] == '?' || cps[i + 1] == '"' ||
              cps[i + 1] == '\'' || cps[i + 1] == ')' || cps[i + 1] == 0x201D)) {
        current.push_back(cps[++i]);
      }
      if (i + 1 == cps.size() || is_whitespace(cps[i + 1])) flush();
    }
  }
  flush();
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  bool has_alnum = false;
  for (char32_t cp : decode_utf8(text)) {
    if (is_whitespace(cp)) {
      if (in_token && has_alnum) ++count;
      in_token = false;
      has_alnum = false;
    } else {
      in_token = true;
      has_alnum = has_alnum || is_alnum(cp);
    }
  }
  if (in_token && has_alnum) ++count;
  return count;
}

std::vector<std::string> basic_tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char32_t cp : decode_utf8(text)) {
    if (cp == 0 || is_control(cp)) continue;
    if (is_whitespace(cp)) {
      flush();
      continue;
    }
    if (lowercase) {
      if (is_combining_mark(cp)) continue;
      cp = strip_accent(to_lower(cp));
    }
    if (is_punctuation(cp) || is_cjk(cp)) {
      flush();
      append_utf8(current, cp);
      flush();
      continue;
    }
    append_utf8(current, cp);
  }
  flush();
  return tokens;
}

std::vector<std::string> word_tokenize(std::string_view sentence) {
  static constexpr std::array<std::string_view, 7> kClitics = {"n't", "'s", "'re", "'ve",
                                                                "'ll", "'d", "'m"};
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    std::string word = encode_utf8(current);
    current.clear();
    // Strip leading/trailing apostrophes used as quotes.
    while (!word.empty() && word.front() == '\'') word.erase(word.begin());
    while (!word.empty() && word.back() == '\'') word.pop_back();
    if (word.empty()) return;
    const std::string lower = to_lower(word);
    for (std::string_view clitic : kClitics) {
      if (lower.size() > clitic.size() && lower.ends_with(clitic)) {
        tokens.push_back(word.substr(0, word.size() - clitic.size()));
        tokens.push_back(word.substr(word.size() - clitic.size()));
        return;
      }
    }
    tokens.push_back(std::move(word));
  };
  for (char32_t cp : decode_utf8(sentence)) {
    if (cp == 0x2019) cp = '\'';
    if (is_alnum(cp) || cp == '\'') {
      current.push_back(cp);
      continue;
    }
    flush();
    if (is_whitespace(cp) || is_control(cp) || is_combining_mark(cp)) continue;
    tokens.push_back(encode_utf8(std::u32string(1, cp)));
  }
  flush();
  return tokens;
}

}  // namespace rhp::text
