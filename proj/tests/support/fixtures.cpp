#include "fixtures.hpp"

#include <cctype>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "tokkit/unicode.hpp"

namespace tokkit::testing {

namespace {

// Core function words appear verbatim; content words are syllable compounds,
// which keeps the distinct-pretoken count high enough to train an 8K merge
// table from a desk-sized corpus.
const std::vector<std::string>& english_function_words() {
  static const std::vector<std::string> words = {
      "the",  "of",    "and",   "a",     "to",    "in",   "is",    "was",
      "that", "for",   "on",    "are",   "with",  "as",   "it",    "at",
      "be",   "this",  "have",  "from",  "or",    "one",  "had",   "by",
      "not",  "but",   "what",  "all",   "were",  "we",   "when",  "your",
      "can",  "said",  "there", "use",   "an",    "each", "which", "she",
      "do",   "how",   "their", "if",    "will",  "up",   "other", "about",
      "out",  "many",  "then",  "them",  "these", "so",   "some",  "her",
      "would", "make", "like",  "him",   "into",  "time", "has",   "look",
      "two",  "more",  "write", "go",    "see",   "no",   "way",   "could",
      "people", "my",  "than",  "first", "water", "been", "call",  "who",
      "its",  "now",   "find",  "long",  "down",  "day",  "did",   "get",
      "come", "made",  "may",   "part",  "over",  "new",  "sound", "take",
      "only", "little", "work", "know",  "place", "year", "live",  "me",
      "back", "give",  "most",  "very",  "after", "thing", "our",  "just",
      "name", "good",  "sentence", "man", "think", "say",  "great", "where",
      "help", "through", "much", "before", "line", "right", "too",  "mean",
      "old",  "any",   "same",  "tell",  "boy",   "follow", "came", "want",
      "show", "also",  "around", "form", "three", "small", "set",  "put",
      "end",  "does",  "another", "well", "large", "must", "big",  "even",
      "such", "because", "turn", "here", "why",   "ask",  "went",  "men",
      "read", "need",  "land",  "different", "home", "us", "move", "try",
      "kind", "hand",  "picture", "again", "change", "off", "play", "spell",
      "air",  "away",  "animal", "house", "point", "page", "letter", "mother",
      "answer", "found", "study", "still", "learn", "should", "world", "high",
  };
  return words;
}

const std::vector<std::string>& english_syllables() {
  static const std::vector<std::string> sylls = {
      "con", "ter", "com", "pro", "per", "sta", "tion", "ment", "ble", "ful",
      "ing", "est", "ive", "ous", "ant", "ent", "al",  "ist", "ism", "ity",
      "gra", "tra", "pre", "dis", "mis", "sub", "inter", "under", "over",
      "mar", "ket", "lan", "gua", "mod", "ern", "tok", "en", "cor", "pus",
      "seg", "men", "fil", "ter", "nor", "mal", "qua", "li", "ty",  "da",
      "ta",  "vo",  "cab", "bu",  "lar", "ry",  "me",  "tric", "pipe", "line",
      "stream", "shard", "batch", "mer", "ge",  "ru",  "le",  "ran", "dom",
      "sam", "ple", "scan", "cloud", "ser", "ver", "na",  "tive", "plat",
      "quo", "rum", "dex", "pho", "bri", "gle", "snap", "crest", "vale",
      "mont", "rid", "lum", "fen", "dor", "brix", "col", "van", "tez",
      "pol", "gram", "scape", "forge", "mill", "hart", "glen", "shore",
      "quist", "bard", "nock", "tide", "wick", "barrow", "crag", "holt",
  };
  return sylls;
}

std::vector<std::string> english_content_words(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& sylls = english_syllables();
  std::vector<std::string> words;
  words.reserve(n);
  std::set<std::string> seen;
  while (words.size() < n) {
    const size_t parts = 2 + rng() % 3;
    std::string w;
    for (size_t i = 0; i < parts; ++i) w += sylls[rng() % sylls.size()];
    if (w.size() > 14) w.resize(14);
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

// Common full syllables plus compositional ones; composed algorithmically
// from the Hangul syllable arithmetic.
std::vector<std::string> korean_words(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const std::vector<std::string> common = {
      "한국", "서울", "사람", "시간", "문제", "사회", "경제", "문화",
      "세계", "학교", "공부", "음식", "여행", "역사", "과학", "기술",
      "언어", "단어", "문장", "이야기", "생각", "마음", "하늘", "바다",
      "나라", "도시", "시장", "회사", "일상", "주말", "아침", "저녁",
      "배고파", "안녕하세요", "감사합니다", "있습니다", "합니다", "입니다",
  };
  // A compact set of frequent syllables.
  static const int choseong[] = {0, 2, 3, 5, 6, 7, 9, 11, 12, 14, 15, 16, 18};
  static const int jungseong[] = {0, 1, 4, 5, 8, 13, 18, 20};
  static const int jongseong[] = {0, 4, 8, 16, 17, 21};

  std::vector<std::string> words;
  words.reserve(n);
  std::set<std::string> seen;
  for (const std::string& w : common) {
    if (seen.insert(w).second) words.push_back(w);
  }
  while (words.size() < n) {
    const size_t sylls = 1 + rng() % 3;
    std::string w;
    for (size_t i = 0; i < sylls; ++i) {
      const int l = choseong[rng() % (sizeof(choseong) / sizeof(int))];
      const int v = jungseong[rng() % (sizeof(jungseong) / sizeof(int))];
      const int t = jongseong[rng() % (sizeof(jongseong) / sizeof(int))];
      const char32_t cp = 0xAC00 + (l * 21 + v) * 28 + t;
      w += unicode::to_utf8(cp);
    }
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::string compose_doc(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                        size_t n_words, bool korean) {
  std::ostringstream doc;
  size_t words_in_sentence = 0;
  size_t sentence_target = 5 + rng() % 10;
  size_t emitted = 0;
  bool sentence_start = true;
  while (emitted < n_words) {
    std::string w = vocab[rng() % vocab.size()];
    if (!korean && sentence_start && !w.empty()) {
      w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    }
    if (!sentence_start) doc << ' ';
    doc << w;
    sentence_start = false;
    ++emitted;
    if (++words_in_sentence >= sentence_target) {
      doc << (korean ? "다." : ".");
      words_in_sentence = 0;
      sentence_target = 5 + rng() % 10;
      sentence_start = true;
      if (emitted < n_words) doc << (rng() % 4 == 0 ? "\n" : " ");
    }
  }
  if (!sentence_start) doc << (korean ? "다." : ".");
  return doc.str();
}

std::string compose_code_doc(std::mt19937_64& rng,
                             const std::vector<std::string>& idents) {
  static const std::vector<std::string> keywords = {
      "def", "return", "if", "else", "for", "while", "class", "import",
      "const", "static", "void", "int", "double", "auto", "struct", "namespace",
  };
  std::ostringstream doc;
  const size_t lines = 12 + rng() % 20;
  for (size_t i = 0; i < lines; ++i) {
    const std::string& kw = keywords[rng() % keywords.size()];
    const std::string& a = idents[rng() % idents.size()];
    const std::string& b = idents[rng() % idents.size()];
    switch (rng() % 4) {
      case 0:
        doc << kw << " " << a << "(" << b << "):\n";
        break;
      case 1:
        doc << "    " << a << " = " << b << "(" << rng() % 100 << ")\n";
        break;
      case 2:
        doc << "    " << kw << " " << a << "." << b << "\n";
        break;
      default:
        doc << "# " << a << " " << b << "\n";
        break;
    }
  }
  return doc.str();
}

std::string compose_stem_doc(std::mt19937_64& rng,
                             const std::vector<std::string>& vocab, bool korean) {
  static const std::vector<std::string> terms = {
      "theorem", "matrix", "vector", "integral", "derivative", "momentum",
      "voltage", "protein", "neuron", "entropy", "gradient", "tensor",
      "quantum", "isotope", "catalyst", "polymer", "velocity", "equation",
  };
  static const std::vector<std::string> ko_terms = {
      "정리", "행렬", "벡터", "적분", "미분", "운동량", "전압", "단백질",
      "신경", "엔트로피", "기울기", "텐서", "양자", "동위원소", "촉매",
  };
  std::ostringstream doc;
  const size_t sentences = 6 + rng() % 8;
  for (size_t i = 0; i < sentences; ++i) {
    const auto& t = korean ? ko_terms : terms;
    doc << (korean ? "이 " : "The ") << t[rng() % t.size()]
        << (korean ? "는 " : " equals ") << rng() % 1000 << "."
        << (korean ? "" : " ");
    if (korean) doc << " ";
    if (i % 3 == 2) {
      doc << vocab[rng() % vocab.size()] << (korean ? "입니다. " : " holds. ");
    }
  }
  return doc.str();
}

std::vector<std::string> docs_from(std::function<std::string(std::mt19937_64&)> make,
                                   size_t n_docs, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> docs;
  docs.reserve(n_docs);
  for (size_t i = 0; i < n_docs; ++i) docs.push_back(make(rng));
  return docs;
}

std::vector<std::string> full_english_vocab() {
  std::vector<std::string> vocab = english_function_words();
  const auto content = english_content_words(3200, 11);
  vocab.insert(vocab.end(), content.begin(), content.end());
  return vocab;
}

}  // namespace

std::vector<std::string> english_general_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> vocab = full_english_vocab();
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_doc(rng, vocab, 80 + rng() % 80, false); },
      n_docs, seed);
}

std::vector<std::string> english_code_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> idents = english_content_words(400, 23);
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_code_doc(rng, idents); },
      n_docs, seed);
}

std::vector<std::string> english_stem_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> vocab = full_english_vocab();
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_stem_doc(rng, vocab, false); },
      n_docs, seed);
}

std::vector<std::string> korean_general_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> vocab = korean_words(1200, 31);
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_doc(rng, vocab, 60 + rng() % 60, true); },
      n_docs, seed);
}

std::vector<std::string> korean_stem_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> vocab = korean_words(1200, 31);
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_stem_doc(rng, vocab, true); },
      n_docs, seed);
}

std::vector<std::string> multilingual_docs(size_t n_docs, uint64_t seed) {
  static const std::vector<std::string> vocab = [] {
    std::mt19937_64 rng(71);
    std::vector<std::string> words;
    std::set<std::string> seen;
    const std::vector<std::pair<char32_t, char32_t>> alphabets = {
        {0x0430, 0x044F},  // Cyrillic а..я
        {0x03B1, 0x03C9},  // Greek α..ω
        {0x0627, 0x063A},  // Arabic ا..غ
    };
    while (words.size() < 900) {
      const auto& [lo, hi] = alphabets[rng() % alphabets.size()];
      const size_t len = 3 + rng() % 6;
      std::string w;
      for (size_t i = 0; i < len; ++i) {
        w += unicode::to_utf8(lo + static_cast<char32_t>(rng() % (hi - lo + 1)));
      }
      if (seen.insert(w).second) words.push_back(w);
    }
    return words;
  }();
  return docs_from(
      [&](std::mt19937_64& rng) { return compose_doc(rng, vocab, 60 + rng() % 60, true); },
      n_docs, seed);
}

const BilingualFixture& bilingual_fixture() {
  static const BilingualFixture fixture = [] {
    BilingualFixture f;

    // Base training: English-dominant with a thin Korean slice, the way an
    // English-centric production tokenizer would have seen a little Korean.
    std::vector<std::string> base_corpus = english_general_docs(300, 101);
    for (auto& d : english_code_docs(70, 102)) base_corpus.push_back(std::move(d));
    for (auto& d : english_stem_docs(70, 103)) base_corpus.push_back(std::move(d));
    for (auto& d : multilingual_docs(90, 105)) base_corpus.push_back(std::move(d));
    for (auto& d : korean_general_docs(4, 104)) base_corpus.push_back(std::move(d));

    std::vector<std::string> donor_corpus = korean_general_docs(150, 201);
    for (auto& d : korean_stem_docs(40, 202)) donor_corpus.push_back(std::move(d));

    f.base = bpe::train(base_corpus, 8192).vocab;
    f.donor = bpe::train(donor_corpus, 2048).vocab;

    f.target_corpora["ko-general"] = korean_general_docs(40, 301);
    f.target_corpora["ko-stem"] = korean_stem_docs(20, 302);
    f.guard_corpora["en-general"] = english_general_docs(40, 303);
    f.guard_corpora["en-code"] = english_code_docs(20, 304);
    f.guard_corpora["en-stem"] = english_stem_docs(20, 305);

    // Utility counting needs a reference that actually represents the guard
    // distribution, or cold-looking rules turn out load-bearing.
    f.reference_corpus = english_general_docs(160, 401);
    for (auto& d : english_code_docs(40, 402)) f.reference_corpus.push_back(std::move(d));
    for (auto& d : english_stem_docs(40, 404)) f.reference_corpus.push_back(std::move(d));
    for (auto& d : korean_general_docs(8, 403)) f.reference_corpus.push_back(std::move(d));
    return f;
  }();
  return fixture;
}

std::map<std::string, std::vector<std::string>> small_domain_corpora() {
  return {
      {"en-general", english_general_docs(8, 501)},
      {"en-code", english_code_docs(4, 502)},
      {"en-stem", english_stem_docs(4, 503)},
      {"ko-general", korean_general_docs(8, 504)},
      {"ko-stem", korean_stem_docs(4, 505)},
  };
}

}  // namespace tokkit::testing
