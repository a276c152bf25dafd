#include "tokkit/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tokkit/errors.hpp"
#include "tokkit/unicode.hpp"

namespace tokkit::corpus {

namespace {

using json = nlohmann::json;

constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const void* data, size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xCBF29CE484222325ull ^ seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return splitmix64(h);
}

uint64_t mod_mersenne61(unsigned __int128 x) {
  uint64_t lo = static_cast<uint64_t>(x & kMersenne61);
  uint64_t hi = static_cast<uint64_t>(x >> 61);
  uint64_t r = lo + hi;
  if (r >= kMersenne61) r -= kMersenne61;
  return r;
}

bool is_blank_line(const std::string& line) {
  size_t offset = 0;
  while (offset < line.size()) {
    const auto dc = unicode::decode_char(line, offset);
    if (!dc.valid || !unicode::is_whitespace(dc.cp)) return false;
  }
  return true;
}

std::string rstrip_whitespace(const std::string& line) {
  // Strip trailing whitespace scalars; needs a scan from the front because
  // UTF-8 cannot be decoded backwards cheaply.
  size_t keep_end = 0;
  size_t offset = 0;
  while (offset < line.size()) {
    const auto dc = unicode::decode_char(line, offset);
    if (!(dc.valid && unicode::is_whitespace(dc.cp))) keep_end = offset;
  }
  return line.substr(0, keep_end);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (true) {
    const size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw InternalError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

DocRecord normalize(std::string_view raw, std::string source) {
  bool lossy = false;
  std::string text = unicode::sanitize_utf8(raw, lossy);
  text = unicode::nfc(text);

  // CRLF → LF.
  std::string no_crlf;
  no_crlf.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    no_crlf.push_back(text[i]);
  }

  std::vector<std::string> lines = split_lines(no_crlf);
  for (std::string& line : lines) line = rstrip_whitespace(line);

  // Cap blank-line runs at two.
  std::vector<std::string> kept;
  kept.reserve(lines.size());
  size_t blank_run = 0;
  for (std::string& line : lines) {
    if (line.empty()) {
      if (++blank_run > 2) continue;
    } else {
      blank_run = 0;
    }
    kept.push_back(std::move(line));
  }

  std::string normalized;
  for (size_t i = 0; i < kept.size(); ++i) {
    if (i) normalized.push_back('\n');
    normalized += kept[i];
  }

  bool printable = false;
  {
    size_t offset = 0;
    while (offset < normalized.size()) {
      const auto dc = unicode::decode_char(normalized, offset);
      if (!dc.valid || !unicode::is_whitespace(dc.cp)) {
        printable = true;
        break;
      }
    }
  }
  if (!printable) throw EmptyDocumentError("document empty after cleaning");

  DocRecord doc;
  doc.text = std::move(normalized);
  doc.id = sha256_hex(doc.text);
  doc.source = std::move(source);
  if (lossy) doc.signals["decode_lossy"] = 1.0;
  return doc;
}

// ---------------------------------------------------------------------------
// Signals and filtering

std::map<std::string, double> heuristic_signals(const DocRecord& doc) {
  const std::u32string chars = unicode::to_utf32(doc.text);
  const double total = static_cast<double>(chars.size());

  uint64_t symbols = 0, digits = 0;
  for (char32_t cp : chars) {
    if (unicode::is_decimal_digit(cp)) {
      ++digits;
    } else if (!unicode::is_letter(cp) && !unicode::is_whitespace(cp)) {
      ++symbols;
    }
  }

  // Sentences end at terminal punctuation, or at the Korean declarative
  // endings 다/요 when followed by whitespace.
  std::vector<uint64_t> sentence_lens;
  uint64_t current = 0;
  auto close_sentence = [&]() {
    if (current > 0) sentence_lens.push_back(current);
    current = 0;
  };
  for (size_t i = 0; i < chars.size(); ++i) {
    const char32_t cp = chars[i];
    if (unicode::is_whitespace(cp) && current == 0) continue;  // leading space
    ++current;
    const bool terminal = cp == U'.' || cp == U'!' || cp == U'?' || cp == U'…';
    const bool korean_ending =
        (cp == U'다' || cp == U'요') &&
        (i + 1 == chars.size() || unicode::is_whitespace(chars[i + 1]));
    if (terminal || korean_ending) close_sentence();
  }
  close_sentence();
  double mean_sentence_len = 0.0;
  if (!sentence_lens.empty()) {
    const uint64_t sum =
        std::accumulate(sentence_lens.begin(), sentence_lens.end(), uint64_t{0});
    mean_sentence_len =
        static_cast<double>(sum) / static_cast<double>(sentence_lens.size());
  }

  // Boilerplate: share of non-blank lines whose exact content appears 3+ times.
  std::vector<std::string> lines = split_lines(doc.text);
  std::unordered_map<std::string, uint64_t> line_counts;
  uint64_t nonblank = 0;
  uint64_t max_line_len = 0;
  for (const std::string& line : lines) {
    max_line_len = std::max(max_line_len, unicode::count_chars(line));
    if (is_blank_line(line)) continue;
    ++nonblank;
    line_counts[line] += 1;
  }
  uint64_t repeated = 0;
  for (const std::string& line : lines) {
    if (!is_blank_line(line) && line_counts.at(line) >= 3) ++repeated;
  }

  std::map<std::string, double> signals;
  signals["symbol_ratio"] = total > 0 ? symbols / total : 0.0;
  signals["digit_ratio"] = total > 0 ? digits / total : 0.0;
  signals["mean_sentence_len"] = mean_sentence_len;
  signals["boilerplate_line_frac"] =
      nonblank > 0 ? static_cast<double>(repeated) / static_cast<double>(nonblank)
                   : 0.0;
  signals["max_line_len"] = static_cast<double>(max_line_len);
  return signals;
}

Thresholds preset(std::string_view name) {
  if (name == "low-quality-removal") {
    // Documented defaults, not reconstructions of any production setting.
    return Thresholds{
        {"symbol_ratio", {0.0, 0.30}},
        {"digit_ratio", {0.0, 0.50}},
        {"boilerplate_line_frac", {0.0, 0.30}},
        {"mean_sentence_len", {5.0, 2000.0}},
        {"max_line_len", {1.0, 8000.0}},
        {"quality_score", {3.0, 5.0}},
    };
  }
  throw ConfigError("unknown filter preset: " + std::string(name));
}

FilterVerdict filter(const DocRecord& doc, const Thresholds& thresholds) {
  FilterVerdict verdict;
  for (const auto& [name, bound] : thresholds) {
    double value = 0.0;
    if (name == "quality_score") {
      if (!doc.quality_score) continue;  // unscored documents pass vacuously
      value = *doc.quality_score;
    } else {
      const auto it = doc.signals.find(name);
      if (it == doc.signals.end()) {
        throw ConfigError("threshold references unknown signal: " + name);
      }
      value = it->second;
    }
    if (value < bound.min) {
      verdict.keep = false;
      verdict.reasons.push_back({name, value, bound.min});
    } else if (value > bound.max) {
      verdict.keep = false;
      verdict.reasons.push_back({name, value, bound.max});
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// PII masking

std::vector<PiiPattern> default_pii_patterns() {
  return {
      {"EMAIL", R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)+)"},
      {"KR_RRN", R"(\b\d{6}-\d{7}\b)"},
      {"PHONE", R"(\+\d{1,3}[- ]?\d{1,4}([- ]?\d{3,4}){1,3}\b)"},
      {"IPV4", R"(\b\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}\b)"},
  };
}

DocRecord mask_pii(DocRecord doc, const std::vector<PiiPattern>& patterns) {
  for (const PiiPattern& p : patterns) {
    std::regex re;
    try {
      re = std::regex(p.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigError("PII pattern '" + p.name + "' does not compile: " +
                        e.what());
    }
    const std::string replacement = "[" + p.name + "]";
    std::string masked = std::regex_replace(doc.text, re, replacement);
    if (masked != doc.text) {
      doc.pii_masked = true;
      doc.text = std::move(masked);
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// MinHash + dedup

MinHashSignature minhash(const DocRecord& doc, size_t k, size_t shingle_n,
                         uint64_t seed) {
  if (k < 16) throw InvalidArgumentError("minhash needs k >= 16");
  if (shingle_n == 0) throw InvalidArgumentError("shingle_n must be positive");
  const std::u32string chars = unicode::to_utf32(doc.text);
  if (chars.size() < shingle_n) {
    throw TooShortError("document shorter than the shingle length");
  }

  std::unordered_set<uint64_t> shingles;
  shingles.reserve(chars.size());
  for (size_t i = 0; i + shingle_n <= chars.size(); ++i) {
    shingles.insert(fnv1a(chars.data() + i, shingle_n * sizeof(char32_t), 0) %
                    kMersenne61);
  }

  // Universal-hash family h_i(x) = (a_i x + b_i) mod 2^61-1, seeded.
  std::mt19937_64 rng(seed);
  MinHashSignature sig;
  sig.hashes.assign(k, UINT64_MAX);
  sig.shingle_n = static_cast<uint32_t>(shingle_n);
  sig.seed = seed;
  for (size_t i = 0; i < k; ++i) {
    const uint64_t a = rng() % (kMersenne61 - 1) + 1;
    const uint64_t b = rng() % kMersenne61;
    uint64_t best = UINT64_MAX;
    for (uint64_t x : shingles) {
      const uint64_t h =
          mod_mersenne61(static_cast<unsigned __int128>(a) * x + b);
      best = std::min(best, h);
    }
    sig.hashes[i] = best;
  }
  return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.hashes.size() != b.hashes.size() || a.shingle_n != b.shingle_n ||
      a.seed != b.seed) {
    throw InvalidArgumentError("signatures are not comparable");
  }
  if (a.hashes.empty()) return 0.0;
  size_t equal = 0;
  for (size_t i = 0; i < a.hashes.size(); ++i) {
    if (a.hashes[i] == b.hashes[i]) ++equal;
  }
  return static_cast<double>(equal) / static_cast<double>(a.hashes.size());
}

std::vector<DocRecord> dedup(const std::vector<DocRecord>& docs,
                             const DedupParams& params) {
  if (params.bands == 0 || params.k % params.bands != 0) {
    throw ConfigError("bands must divide k");
  }
  const size_t rows = params.k / params.bands;
  const size_t n = docs.size();

  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Earliest input index wins as the cluster representative.
    if (a < b) parent[b] = a;
    else parent[a] = b;
  };

  // Exact duplicates always collapse, whatever their length.
  std::unordered_map<std::string, size_t> first_by_text;
  for (size_t i = 0; i < n; ++i) {
    auto [it, inserted] = first_by_text.emplace(docs[i].text, i);
    if (!inserted) unite(it->second, i);
  }

  // Near duplicates via LSH banding over MinHash signatures.
  std::vector<std::optional<MinHashSignature>> sigs(n);
  for (size_t i = 0; i < n; ++i) {
    try {
      sigs[i] = minhash(docs[i], params.k, params.shingle_n, params.seed);
    } catch (const TooShortError&) {
      // Too short to shingle; exact phase already covered it.
    }
  }

  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  for (size_t i = 0; i < n; ++i) {
    if (!sigs[i]) continue;
    for (size_t b = 0; b < params.bands; ++b) {
      const uint64_t key =
          fnv1a(sigs[i]->hashes.data() + b * rows, rows * sizeof(uint64_t), b + 1);
      buckets[key].push_back(i);
    }
  }
  for (const auto& [key, members] : buckets) {
    for (size_t x = 0; x < members.size(); ++x) {
      for (size_t y = x + 1; y < members.size(); ++y) {
        const size_t i = members[x], j = members[y];
        if (find(i) == find(j)) continue;
        if (estimate_jaccard(*sigs[i], *sigs[j]) >= params.threshold) {
          unite(i, j);
        }
      }
    }
  }

  std::vector<DocRecord> survivors;
  survivors.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (find(i) == i) survivors.push_back(docs[i]);
  }
  return survivors;
}

// ---------------------------------------------------------------------------
// Classifier metrics

EvalResult classifier_eval(const std::vector<double>& predictions,
                           const std::vector<double>& labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgumentError("predictions and labels differ in length");
  }
  if (predictions.empty()) {
    throw InvalidArgumentError("classifier_eval needs at least one pair");
  }
  for (const auto& list : {predictions, labels}) {
    for (double v : list) {
      if (v < 0.0 || v > 5.0) {
        throw InvalidArgumentError("quality scores must lie in [0,5]");
      }
    }
  }

  EvalResult result;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_low = predictions[i] < 3.0;
    const bool label_low = labels[i] < 3.0;
    if (pred_low && label_low) ++result.counts.tp;
    else if (pred_low && !label_low) ++result.counts.fp;
    else if (!pred_low && label_low) ++result.counts.fn;
    else ++result.counts.tn;
  }
  const double total = static_cast<double>(predictions.size());
  result.accuracy = (result.counts.tp + result.counts.tn) / total;
  const uint64_t low_total = result.counts.tp + result.counts.fn;
  if (low_total > 0) {
    result.low_quality_recall =
        static_cast<double>(result.counts.tp) / static_cast<double>(low_total);
  }
  return result;
}

double default_quality_score(const DocRecord& doc) {
  const auto signals = heuristic_signals(doc);
  double score = 5.0;
  score -= 6.0 * signals.at("symbol_ratio");
  score -= 3.0 * signals.at("boilerplate_line_frac");
  score -= 2.0 * signals.at("digit_ratio");
  const double msl = signals.at("mean_sentence_len");
  if (msl < 15.0) score -= (15.0 - msl) / 15.0 * 2.0;
  if (signals.at("max_line_len") > 4000.0) score -= 1.0;
  return std::clamp(score, 0.0, 5.0);
}

// ---------------------------------------------------------------------------
// Shard I/O

namespace {

json signature_to_json(const MinHashSignature& sig) {
  return json{{"hashes", sig.hashes}, {"seed", sig.seed}, {"shingle_n", sig.shingle_n}};
}

}  // namespace

std::string doc_to_json(const DocRecord& doc) {
  json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  j["source"] = doc.source;
  j["signals"] = doc.signals;
  j["quality_score"] = doc.quality_score ? json(*doc.quality_score) : json();
  j["pii_masked"] = doc.pii_masked;
  j["signature"] = doc.signature ? signature_to_json(*doc.signature) : json();
  return j.dump();
}

DocRecord doc_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad shard record: ") + e.what());
  }
  DocRecord doc;
  doc.id = j.at("id").get<std::string>();
  doc.text = j.at("text").get<std::string>();
  doc.source = j.at("source").get<std::string>();
  doc.signals = j.at("signals").get<std::map<std::string, double>>();
  if (!j.at("quality_score").is_null()) {
    doc.quality_score = j.at("quality_score").get<double>();
  }
  doc.pii_masked = j.at("pii_masked").get<bool>();
  if (!j.at("signature").is_null()) {
    MinHashSignature sig;
    sig.hashes = j["signature"].at("hashes").get<std::vector<uint64_t>>();
    sig.seed = j["signature"].at("seed").get<uint64_t>();
    sig.shingle_n = j["signature"].at("shingle_n").get<uint32_t>();
    doc.signature = std::move(sig);
  }
  return doc;
}

std::vector<std::filesystem::path> shard(const std::vector<DocRecord>& docs,
                                         size_t max_docs_per_shard,
                                         const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (max_docs_per_shard == 0) {
    throw InvalidArgumentError("max_docs_per_shard must be at least 1");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError("cannot create output directory: " + out_dir.string());
  }

  const size_t shard_count = (docs.size() + max_docs_per_shard - 1) / max_docs_per_shard;
  std::vector<std::string> names;
  std::vector<std::string> payloads;
  names.reserve(shard_count);
  payloads.reserve(shard_count);
  for (size_t s = 0; s < shard_count; ++s) {
    std::ostringstream name;
    name << "shard-" << std::setw(5) << std::setfill('0') << s << ".jsonl";
    names.push_back(name.str());
    std::string payload;
    const size_t begin = s * max_docs_per_shard;
    const size_t end = std::min(docs.size(), begin + max_docs_per_shard);
    for (size_t i = begin; i < end; ++i) {
      payload += doc_to_json(docs[i]);
      payload += '\n';
    }
    payloads.push_back(std::move(payload));
  }

  json manifest;
  manifest["total_docs"] = docs.size();
  json shards = json::array();
  for (size_t s = 0; s < shard_count; ++s) {
    const size_t begin = s * max_docs_per_shard;
    const size_t end = std::min(docs.size(), begin + max_docs_per_shard);
    shards.push_back(json{{"path", names[s]},
                          {"docs", end - begin},
                          {"sha256", sha256_hex(payloads[s])}});
  }
  manifest["shards"] = std::move(shards);

  // Stage everything under temp names, then rename with the manifest last;
  // a failed or interrupted run never exposes a readable partial dataset.
  std::vector<fs::path> temps;
  std::vector<fs::path> finals;
  auto cleanup = [&]() {
    std::error_code ignore;
    for (const fs::path& p : temps) fs::remove(p, ignore);
    for (const fs::path& p : finals) fs::remove(p, ignore);
  };

  try {
    for (size_t s = 0; s < shard_count; ++s) {
      const fs::path tmp = out_dir / (names[s] + ".tmp");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + tmp.string());
      temps.push_back(tmp);
      out << payloads[s];
      if (!out.flush()) throw IoError("write failed: " + tmp.string());
    }
    const fs::path manifest_tmp = out_dir / "manifest.json.tmp";
    {
      std::ofstream out(manifest_tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + manifest_tmp.string());
      temps.push_back(manifest_tmp);
      out << manifest.dump();
      if (!out.flush()) throw IoError("write failed: " + manifest_tmp.string());
    }

    std::vector<fs::path> results;
    for (size_t s = 0; s < shard_count; ++s) {
      const fs::path target = out_dir / names[s];
      fs::rename(out_dir / (names[s] + ".tmp"), target, ec);
      if (ec) throw IoError("cannot rename shard into place: " + target.string());
      finals.push_back(target);
      results.push_back(target);
    }
    fs::rename(manifest_tmp, out_dir / "manifest.json", ec);
    if (ec) throw IoError("cannot rename manifest into place");
    return results;
  } catch (...) {
    cleanup();
    throw;
  }
}

ShardManifest read_manifest(const std::filesystem::path& out_dir) {
  std::ifstream in(out_dir / "manifest.json", std::ios::binary);
  if (!in) throw IoError("cannot open manifest in " + out_dir.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad manifest: ") + e.what());
  }
  ShardManifest manifest;
  manifest.total_docs = j.at("total_docs").get<uint64_t>();
  for (const auto& row : j.at("shards")) {
    manifest.shards.push_back(ShardInfo{row.at("path").get<std::string>(),
                                        row.at("docs").get<uint64_t>(),
                                        row.at("sha256").get<std::string>()});
  }
  return manifest;
}

std::vector<DocRecord> read_shards(const std::filesystem::path& out_dir) {
  const ShardManifest manifest = read_manifest(out_dir);
  std::vector<DocRecord> docs;
  docs.reserve(manifest.total_docs);
  for (const ShardInfo& info : manifest.shards) {
    std::ifstream in(out_dir / info.path, std::ios::binary);
    if (!in) throw IoError("cannot open shard " + info.path);
    std::string payload((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (sha256_hex(payload) != info.sha256) {
      throw IoError("shard digest mismatch: " + info.path);
    }
    std::istringstream lines(payload);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) docs.push_back(doc_from_json(line));
    }
  }
  return docs;
}

}  // namespace tokkit::corpus
