#include "rhp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "rhp/text.hpp"

#ifndef RHP_DATA_DIR
#define RHP_DATA_DIR "data"
#endif

namespace rhp {

using namespace text;

namespace {

void add_all(std::unordered_map<std::string, std::string>& lex, std::string_view tag,
             std::initializer_list<const char*> words) {
  for (const char* w : words) lex.emplace(w, std::string(tag));
}

bool is_number(const std::string& w) {
  bool digit = false;
  for (char c : w) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '/' && c != ':') {
      return false;
    }
  }
  return digit;
}

bool punctuation_only(const std::string& w) {
  const auto cps = decode_utf8(w);
  if (cps.empty()) return true;
  return std::all_of(cps.begin(), cps.end(), [](char32_t c) { return is_punctuation(c) || is_whitespace(c); });
}

bool has_emoji(const std::string& w) {
  const auto cps = decode_utf8(w);
  return std::any_of(cps.begin(), cps.end(), [](char32_t c) { return is_emoji(c); });
}

// k log x + (n - k) log(1 - x), with 0 log 0 = 0.
double log_binomial(double k, double n, double x) {
  double s = 0.0;
  if (k > 0.0) s += k * std::log(x);
  if (n - k > 0.0) s += (n - k) * std::log1p(-x);
  return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool ranked_before(const RankedNgram& a, const RankedNgram& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.ngram < b.ngram;
}

}  // namespace

RuleBasedTagger::RuleBasedTagger() {
  auto& l = lexicon_;
  add_all(l, "DT", {"the", "a", "an", "this", "that", "these", "those", "every", "each", "some", "any", "no",
                    "another", "all", "both", "either", "neither"});
  add_all(l, "PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them", "myself",
                     "yourself", "himself", "herself", "itself", "ourselves", "themselves"});
  add_all(l, "PRP$", {"my", "your", "his", "her", "its", "our", "their"});
  add_all(l, "WP", {"who", "what", "whom", "whose"});
  add_all(l, "WDT", {"which"});
  add_all(l, "WRB", {"when", "where", "why", "how"});
  add_all(l, "IN", {"of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
                    "during", "before", "after", "above", "below", "from", "up", "down", "out", "off", "over",
                    "under", "near", "since", "until", "upon", "within", "without", "like", "than", "as",
                    "because", "while", "although", "though", "if", "across", "behind", "beside", "despite",
                    "per", "via", "toward", "towards", "onto", "except", "unless", "whether"});
  add_all(l, "CC", {"and", "or", "but", "nor", "yet", "plus"});
  add_all(l, "TO", {"to"});
  add_all(l, "MD", {"can", "could", "will", "would", "shall", "should", "may", "might", "must", "wo", "ca"});
  add_all(l, "EX", {"there"});
  add_all(l, "UH", {"wow", "oh", "ok", "okay", "yes", "hey", "ugh", "yay"});
  add_all(l, "VBZ", {"is", "has", "does", "'s", "gets", "makes", "says", "seems", "looks", "feels"});
  add_all(l, "VBP", {"are", "am", "have", "do", "'re", "'ve", "'m"});
  add_all(l, "VBD", {"was", "were", "had", "did", "went", "got", "made", "said", "took", "came", "saw", "knew",
                     "thought", "felt", "left", "gave", "paid", "told", "found", "ate", "drank", "slept", "stayed",
                     "arrived", "checked", "booked", "asked", "wanted", "seemed", "looked", "called", "waited",
                     "tried", "used", "needed", "spent", "brought", "bought", "kept", "ordered", "served"});
  add_all(l, "VBN", {"been", "done", "gone", "known", "seen", "taken", "given", "eaten", "written"});
  add_all(l, "VBG", {"being", "having", "doing", "going", "getting", "staying", "looking", "making", "trying"});
  add_all(l, "VB", {"be", "go", "get", "make", "say", "take", "come", "see", "know", "think", "give", "find",
                    "recommend", "eat", "try", "avoid", "return", "expect", "enjoy", "spend", "pay", "wait",
                    "ask", "tell", "leave", "keep", "bring", "buy", "sleep", "feel", "seem", "want", "need"});
  add_all(l, "RB", {"not", "n't", "very", "really", "too", "also", "just", "so", "quite", "never", "always",
                    "again", "back", "here", "even", "still", "only", "well", "definitely", "highly", "maybe",
                    "perhaps", "almost", "already", "soon", "often", "sometimes", "rather", "then", "now",
                    "once", "twice", "ever", "away", "however", "instead", "otherwise", "anyway", "else", "fast", "nearby",
                    "upstairs", "downstairs", "outside", "inside", "later", "together", "overall"});
  add_all(l, "JJ", {"good", "great", "bad", "nice", "clean", "dirty", "small", "big", "large", "friendly",
                    "helpful", "new", "old", "excellent", "amazing", "awesome", "terrible", "horrible", "poor",
                    "beautiful", "lovely", "perfect", "comfortable", "quiet", "noisy", "loud", "cheap",
                    "expensive", "free", "hot", "cold", "rude", "little", "fresh", "delicious", "tasty",
                    "spacious", "close", "far", "main", "whole", "first", "last", "next", "other", "same", "few",
                    "many", "much", "more", "several", "extra", "fine", "decent", "average", "ok", "smelly",
                    "pricey", "dusty", "busy", "sunny", "cozy", "comfy", "filthy", "greasy", "salty", "spicy",
                    "trendy", "fancy", "happy", "angry", "sorry", "ready", "easy", "early", "late", "pretty",
                    "heavy", "tiny", "empty", "creepy", "shabby", "sketchy", "stuffy", "chilly", "crispy", "juicy",
                    "handy", "lucky", "scary", "musty", "moldy", "huge", "high", "low", "long", "short", "full",
                    "open", "modern", "private", "public", "local", "real", "sure", "able", "worth", "top",
                    "overall", "slow", "quick", "warm", "wonderful", "fantastic", "superb", "outstanding",
                    "okay", "mediocre", "bland", "stale", "broken", "unfriendly", "unhelpful", "rundown",
                    "overpriced", "disgusting", "gross", "nasty", "awful", "clear", "own", "only", "entire",
                    "various", "different", "special", "simple", "safe", "central", "convenient", "detailed",
                    "thorough", "informative", "meh"});
  add_all(l, "JJR", {"better", "worse", "bigger", "smaller", "cheaper", "cleaner", "nicer", "larger", "less"});
  add_all(l, "JJS", {"best", "worst", "most", "least", "biggest", "nicest", "cleanest", "cheapest"});
  add_all(l, "CD", {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "hundred",
                    "thousand", "dozen"});
  // Frequent nouns that the suffix rules would mistag.
  add_all(l, "NN", {"bed", "parking", "building", "ceiling", "wedding", "morning", "evening", "booking",
                    "lighting", "bedding", "dressing", "seating", "ring", "thing", "nothing", "something",
                    "anything", "everything", "king", "spring", "string", "ping", "feed", "need", "speed", "shed",
                    "breakfast", "lobby", "city", "family", "party", "body", "everybody", "nobody", "anybody",
                    "somebody", "everyone", "someone", "anyone", "money", "journey", "key", "day", "way", "stay",
                    "bus", "glass", "pass", "class", "business", "gas", "menu", "tv", "wifi", "staff", "service",
                    "desk", "resort", "fee", "view", "pool", "room", "location", "time", "price", "food", "area",
                    "bathroom", "shower", "towel", "carpet", "manager", "reception", "check", "experience",
                    "night", "week", "weekend", "trip", "lot", "car", "cable", "beach", "chair", "bug", "noise",
                    "smell", "floor", "window", "air", "water", "coffee", "dinner", "lunch", "table", "waiter",
                    "waitress", "server", "bar", "drink", "meal", "dish", "plate", "order", "bill", "charge",
                    "tip", "street", "station", "airport", "walk", "distance", "value", "quality", "problem",
                    "issue", "deal", "review", "star", "hour", "minute", "rest", "guest", "request", "interest",
                    "restaurant", "hotel", "door", "elevator", "stairs", "gym", "spa", "wine", "beer", "steak",
                    "chicken", "fish", "rice", "bread", "cheese", "pizza", "burger", "sauce", "salad", "soup",
                    "dessert", "cake", "price", "kitchen", "balcony", "sea", "ocean", "garden", "terrace"});
  add_all(l, "NNS", {"people", "men", "women", "children", "feet", "teeth", "mice", "stairs", "clothes", "sheets",
                     "police", "news"});
}

std::string RuleBasedTagger::lexical_tag(const std::string& w) const {
  if (const auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  if (is_number(w)) return "CD";
  if (punctuation_only(w)) return w.size() == 1 ? w : ":";
  const auto ends = [&](std::string_view s) { return w.size() > s.size() + 1 && w.ends_with(s); };
  if (ends("ly")) return "RB";
  if (ends("ing")) return "VBG";
  if (ends("ed")) return "VBD";
  for (std::string_view s : {"ous", "ful", "ive", "able", "ible", "ical", "less", "ish", "ular", "ary"}) {
    if (ends(s)) return "JJ";
  }
  if (ends("s") && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is")) return "NNS";
  return "NN";
}

std::vector<std::string> RuleBasedTagger::tag(std::span<const std::string> words) const {
  std::vector<std::string> tags;
  tags.reserve(words.size());
  for (const auto& word : words) tags.push_back(lexical_tag(to_lower(word)));
  for (std::size_t i = 1; i < tags.size(); ++i) {
    const std::string& prev = tags[i - 1];
    const std::string w = to_lower(words[i]);
    const bool listed = lexicon_.contains(w);
    if ((prev == "TO" || prev == "MD") && (tags[i] == "NN" || tags[i] == "VBP")) {
      tags[i] = "VB";
    } else if (prev == "PRP" && tags[i] == "NN" && !listed) {
      tags[i] = "VBP";
    } else if (prev == "PRP" && tags[i] == "NNS" && (w == "s" || !listed)) {
      tags[i] = "VBZ";
    } else if ((prev == "DT" || prev == "PRP$" || prev == "JJ") && (tags[i] == "VB" || tags[i] == "VBP")) {
      tags[i] = "NN";
    }
  }
  return tags;
}

std::string RuleBasedLemmatizer::lemmatize(const std::string& word, const std::string& tag) const {
  if (tag != "NNS") return word;
  static const std::unordered_map<std::string, std::string> irregular{
      {"men", "man"},     {"women", "woman"}, {"children", "child"}, {"feet", "foot"},   {"teeth", "tooth"},
      {"mice", "mouse"},  {"geese", "goose"}, {"knives", "knife"},   {"wives", "wife"},  {"lives", "life"},
      {"leaves", "leaf"}, {"shelves", "shelf"}, {"loaves", "loaf"},  {"people", "people"}, {"stairs", "stairs"},
      {"clothes", "clothes"}, {"police", "police"}, {"news", "news"}, {"series", "series"}, {"species", "species"}};
  if (const auto it = irregular.find(word); it != irregular.end()) return it->second;
  const auto ends = [&](std::string_view s) { return word.size() > s.size() && word.ends_with(s); };
  if (ends("ies") && word.size() > 4) return word.substr(0, word.size() - 3) + "y";
  if (ends("sses")) return word.substr(0, word.size() - 2);
  for (std::string_view s : {"ches", "shes", "xes", "zes"}) {
    if (ends(s)) return word.substr(0, word.size() - 2);
  }
  if (ends("s") && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is")) {
    return word.substr(0, word.size() - 1);
  }
  return word;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, double> entries;
  std::size_t line_no = 0;
  for (const auto& raw : read_lines(path, "sentiment lexicon")) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(fmt::format("{}:{}: expected 'term<TAB>valence'", path.string(), line_no));
    }
    const std::string term = to_lower(trim(line.substr(0, tab)));
    const std::string value = trim(line.substr(tab + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw DataError(fmt::format("{}:{}: bad valence '{}'", path.string(), line_no, value));
    entries[term] = v;
  }
  return SentimentLexicon(std::move(entries));
}

double SentimentLexicon::valence(std::string_view term) const {
  const auto it = entries_.find(std::string(term));
  return it == entries_.end() ? 0.0 : it->second;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::unordered_set<std::string> words;
  for (const auto& raw : read_lines(path, "stopword list")) {
    const std::string w = trim(raw);
    if (w.empty() || w.front() == '#') continue;
    words.insert(to_lower(w));
  }
  return StopwordList(std::move(words));
}

std::filesystem::path default_lexicon_path() { return std::filesystem::path(RHP_DATA_DIR) / "sentiment_lexicon.tsv"; }
std::filesystem::path default_stopwords_path() { return std::filesystem::path(RHP_DATA_DIR) / "stopwords_en.txt"; }

AnalysisResources AnalysisResources::load(const std::filesystem::path& lexicon_path,
                                          const std::filesystem::path& stopwords_path) {
  AnalysisResources r;
  r.tagger = std::make_shared<RuleBasedTagger>();
  r.lemmatizer = std::make_shared<RuleBasedLemmatizer>();
  r.lexicon = SentimentLexicon::load(lexicon_path);
  r.stopwords = StopwordList::load(stopwords_path);
  return r;
}

std::vector<std::vector<CandidateToken>> preprocess(std::string_view text, const AnalysisResources& res) {
  if (!res.tagger || !res.lemmatizer) throw DataError("analysis resources lack a tagger or lemmatizer");
  const auto is_domain = [&](const std::string& w) {
    return std::find(res.domain_stopwords.begin(), res.domain_stopwords.end(), w) != res.domain_stopwords.end();
  };
  std::vector<std::vector<CandidateToken>> out;
  for (const auto& sentence : split_sentences(text)) {
    const auto words = word_tokenize(sentence);
    if (words.empty()) continue;
    const auto tags = res.tagger->tag(words);
    std::vector<CandidateToken> kept;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const std::string lower = to_lower(words[i]);
      if (punctuation_only(lower)) continue;
      const std::string lemma = res.lemmatizer->lemmatize(lower, tags[i]);
      if (res.stopwords.contains(lower) || res.stopwords.contains(lemma) || is_domain(lower) || is_domain(lemma)) {
        continue;
      }
      CandidateToken t;
      t.surface = words[i];
      t.lemma = lemma;
      t.pos_tag = tags[i];
      t.is_noun = tags[i] == "NN" || tags[i] == "NNS";
      t.sentiment_valence = res.lexicon.valence(lower);
      if (t.sentiment_valence == 0.0) t.sentiment_valence = res.lexicon.valence(lemma);
      kept.push_back(std::move(t));
    }
    out.push_back(std::move(kept));
  }
  return out;
}

std::vector<CandidateToken> filter_candidates(std::span<const CandidateToken> tokens) {
  std::vector<CandidateToken> out;
  for (const auto& t : tokens) {
    if (t.is_noun && t.sentiment_valence == 0.0 && !has_emoji(t.surface) && !has_emoji(t.lemma)) out.push_back(t);
  }
  return out;
}

std::vector<RankedNgram> rank_unigrams(const ClassSentences& sentences, std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s) ++counts[w];
  }
  std::vector<RankedNgram> ranked;
  ranked.reserve(counts.size());
  for (const auto& [w, c] : counts) ranked.push_back({w, static_cast<double>(c), c});
  std::sort(ranked.begin(), ranked.end(), ranked_before);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

double likelihood_ratio(double c12, double c1, double c2, double n) {
  if (n <= 0.0) return 0.0;
  // The statistic is symmetric in the two marginals; a canonical order makes
  // word pairs with swapped marginals tie exactly instead of up to rounding.
  if (c1 > c2) std::swap(c1, c2);
  const double p = c2 / n;
  const double p1 = c1 > 0.0 ? c12 / c1 : 0.0;
  const double p2 = n - c1 > 0.0 ? (c2 - c12) / (n - c1) : 0.0;
  const double log_lambda = log_binomial(c12, c1, p) + log_binomial(c2 - c12, n - c1, p) -
                            log_binomial(c12, c1, p1) - log_binomial(c2 - c12, n - c1, p2);
  return -2.0 * log_lambda;
}

std::vector<RankedNgram> rank_bigrams(const ClassSentences& sentences, std::size_t k, std::size_t min_freq) {
  std::map<std::string, std::size_t> unigram;
  std::map<std::pair<std::string, std::string>, std::size_t> joint;
  std::size_t n = 0;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++unigram[s[i]];
      ++n;
      if (i + 1 < s.size()) ++joint[{s[i], s[i + 1]}];
    }
  }
  std::vector<RankedNgram> ranked;
  if (n == 0) return ranked;
  for (const auto& [pair, c12] : joint) {
    if (c12 < min_freq) continue;
    const double score = likelihood_ratio(static_cast<double>(c12), static_cast<double>(unigram[pair.first]),
                                          static_cast<double>(unigram[pair.second]), static_cast<double>(n));
    ranked.push_back({pair.first + " " + pair.second, score, c12});
  }
  std::sort(ranked.begin(), ranked.end(), ranked_before);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::map<std::string, std::set<int>> overlap_map(const std::array<std::vector<RankedNgram>, kNumClasses>& lists) {
  std::map<std::string, std::set<int>> out;
  for (int c = 0; c < kNumClasses; ++c) {
    for (const auto& g : lists[static_cast<std::size_t>(c)]) out[g.ngram].insert(c + 1);
  }
  return out;
}

NgramReport overlap_report(std::array<std::vector<RankedNgram>, kNumClasses> unigrams,
                           std::array<std::vector<RankedNgram>, kNumClasses> bigrams) {
  NgramReport r;
  r.unigram_overlap = overlap_map(unigrams);
  r.bigram_overlap = overlap_map(bigrams);
  r.unigrams = std::move(unigrams);
  r.bigrams = std::move(bigrams);
  return r;
}

std::array<ClassSentences, kNumClasses> class_candidates(const RawCorpus& corpus,
                                                         const std::map<std::string, HelpfulnessClass>& labels,
                                                         std::span<const std::string> ids,
                                                         const AnalysisResources& res, const AnalysisOptions& options,
                                                         Exec exec) {
  std::array<std::vector<std::string>, kNumClasses> by_class;
  for (const auto& id : ids) {
    const auto it = labels.find(id);
    if (it == labels.end()) throw DataError("review '" + id + "' has no label");
    by_class[static_cast<std::size_t>(it->second - 1)].push_back(id);
  }
  std::array<ClassSentences, kNumClasses> out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    std::sort(members.begin(), members.end());
    if (options.sample_per_class && members.size() > *options.sample_per_class) {
      Rng rng(derive_seed(options.seed, 0xA5A1'0000ULL + c));
      rng.shuffle(std::span<std::string>(members));
      members.resize(*options.sample_per_class);
      std::sort(members.begin(), members.end());
    }
    std::vector<ClassSentences> per_review(members.size());
    kernels::for_each_index(exec, members.size(), [&](std::size_t i) {
      const ReviewRecord* r = corpus.find_review(members[i]);
      if (r == nullptr) throw DataError("review '" + members[i] + "' is not in the corpus");
      for (const auto& sentence : preprocess(r->text, res)) {
        std::vector<std::string> lemmas;
        for (const auto& t : filter_candidates(sentence)) lemmas.push_back(t.lemma);
        if (!lemmas.empty()) per_review[i].push_back(std::move(lemmas));
      }
    });
    for (auto& s : per_review) {
      for (auto& sentence : s) out[c].push_back(std::move(sentence));
    }
  }
  return out;
}

NgramReport analyze(const std::array<ClassSentences, kNumClasses>& per_class, const AnalysisOptions& options,
                    Exec exec) {
  std::array<std::vector<RankedNgram>, kNumClasses> uni, bi;
  kernels::for_each_index(exec, kNumClasses, [&](std::size_t c) {
    uni[c] = rank_unigrams(per_class[c], options.top_k);
    bi[c] = rank_bigrams(per_class[c], options.top_k, options.min_freq);
  });
  return overlap_report(std::move(uni), std::move(bi));
}

nlohmann::json NgramReport::to_json() const {
  auto lists = [](const std::array<std::vector<RankedNgram>, kNumClasses>& all,
                  const std::map<std::string, std::set<int>>& overlap) {
    nlohmann::json j = nlohmann::json::object();
    for (int c = 0; c < kNumClasses; ++c) {
      auto rows = nlohmann::json::array();
      for (const auto& g : all[static_cast<std::size_t>(c)]) {
        rows.push_back({{"ngram", g.ngram},
                        {"score", g.score},
                        {"count", g.count},
                        {"classes", std::vector<int>(overlap.at(g.ngram).begin(), overlap.at(g.ngram).end())}});
      }
      j[std::to_string(c + 1)] = std::move(rows);
    }
    return j;
  };
  return {{"unigrams", lists(unigrams, unigram_overlap)}, {"bigrams", lists(bigrams, bigram_overlap)}};
}

std::string render_ngram_table(const NgramReport& report) {
  auto cell = [](const RankedNgram& g, const std::map<std::string, std::set<int>>& overlap) {
    const std::size_t n = overlap.at(g.ngram).size();
    return n > 1 ? fmt::format("{} ({})", g.ngram, n) : g.ngram;
  };
  std::size_t rows_uni = 0, rows_bi = 0;
  std::size_t width = 10;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    rows_uni = std::max(rows_uni, report.unigrams[c].size());
    rows_bi = std::max(rows_bi, report.bigrams[c].size());
    for (const auto& g : report.unigrams[c]) width = std::max(width, cell(g, report.unigram_overlap).size());
    for (const auto& g : report.bigrams[c]) width = std::max(width, cell(g, report.bigram_overlap).size());
  }
  std::string out = fmt::format("{:<9}", "");
  for (int c = 1; c <= kNumClasses; ++c) out += fmt::format(" | {:<{}}", fmt::format("Class #{}", c), width);
  out += "\n" + std::string(9 + kNumClasses * (width + 3), '-') + "\n";
  auto block = [&](const char* title, const std::array<std::vector<RankedNgram>, kNumClasses>& lists,
                   const std::map<std::string, std::set<int>>& overlap, std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
      out += fmt::format("{:<9}", r == 0 ? title : "");
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const std::string text = r < lists[c].size() ? cell(lists[c][r], overlap) : "";
        out += fmt::format(" | {:<{}}", text, width);
      }
      out += "\n";
    }
  };
  block("Unigrams", report.unigrams, report.unigram_overlap, rows_uni);
  out += std::string(9 + kNumClasses * (width + 3), '-') + "\n";
  block("Bigrams", report.bigrams, report.bigram_overlap, rows_bi);
  out += "(n): the entry appears in the top lists of n classes\n";
  return out;
}

}  // namespace rhp
