#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokkit::corpus {

struct MinHashSignature {
  std::vector<uint64_t> hashes;  // length k
  uint32_t shingle_n = 0;
  uint64_t seed = 0;

  bool operator==(const MinHashSignature&) const = default;
};

/// A document in the unified pipeline schema. The id is content-addressed
/// (hex digest of the normalized text), so equal text from different sources
/// collides on purpose.
struct DocRecord {
  std::string id;
  std::string text;
  std::string source;
  std::map<std::string, double> signals;
  std::optional<double> quality_score;  // in [0,5] when present
  bool pii_masked = false;
  std::optional<MinHashSignature> signature;
};

std::string sha256_hex(std::string_view bytes);

/// Canonical one-line JSON for shard records (sorted keys, no whitespace).
std::string doc_to_json(const DocRecord& doc);
DocRecord doc_from_json(std::string_view line);

/// Normalization: lossy UTF-8 decode (flagged in signals as decode_lossy),
/// NFC, CRLF→LF, per-line trailing-whitespace strip, blank-line runs capped
/// at two. Throws EmptyDocumentError when nothing printable remains.
DocRecord normalize(std::string_view raw, std::string source);

/// Deterministic per-document statistics: symbol_ratio, digit_ratio,
/// mean_sentence_len, boilerplate_line_frac, max_line_len.
std::map<std::string, double> heuristic_signals(const DocRecord& doc);

struct Threshold {
  double min;
  double max;
};
using Thresholds = std::map<std::string, Threshold>;

/// Named threshold presets; "low-quality-removal" keeps documents whose
/// signals sit inside conservative structural bounds and whose quality score
/// (when present) is at least 3.
Thresholds preset(std::string_view name);

struct FilterReason {
  std::string rule;
  double observed;
  double bound;  // the violated bound
};

struct FilterVerdict {
  bool keep = true;
  std::vector<FilterReason> reasons;
};

/// Keep iff every configured signal lies inside its [min,max]. quality_score
/// participates when the document has one; a threshold naming any other
/// missing signal is a ConfigError.
FilterVerdict filter(const DocRecord& doc, const Thresholds& thresholds);

struct PiiPattern {
  std::string name;     // placeholder name, rendered as [NAME]
  std::string pattern;  // ECMAScript regex
};

/// Email, Korean resident-registration-number shape, international phone,
/// IPv4 — in that order.
std::vector<PiiPattern> default_pii_patterns();

/// Replaces every match with its [NAME] placeholder; sets pii_masked when at
/// least one replacement happened. Throws ConfigError for invalid patterns.
DocRecord mask_pii(DocRecord doc, const std::vector<PiiPattern>& patterns);

/// MinHash over character shingles of the document text. Throws
/// InvalidArgumentError for k < 16 and TooShortError when the text has fewer
/// than shingle_n characters.
MinHashSignature minhash(const DocRecord& doc, size_t k, size_t shingle_n,
                         uint64_t seed);

/// Fraction of equal signature components. Signatures must share
/// (k, shingle_n, seed).
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

struct DedupParams {
  size_t k = 128;
  size_t shingle_n = 5;
  uint64_t seed = 0;
  size_t bands = 16;       // must divide k
  double threshold = 0.8;  // estimated-Jaccard clustering threshold
};

/// Near-duplicate removal: exact-text duplicates always collapse; LSH banding
/// proposes candidates, pairs at estimated Jaccard >= threshold cluster, and
/// the earliest document of each cluster survives. Input order is preserved.
/// Documents shorter than shingle_n only participate in the exact phase.
std::vector<DocRecord> dedup(const std::vector<DocRecord>& docs,
                             const DedupParams& params);

struct EvalCounts {
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;  // on the low-quality class
};

struct EvalResult {
  double accuracy = 0.0;
  std::optional<double> low_quality_recall;  // empty when no low-quality labels
  EvalCounts counts;
};

/// Binarizes 0–5 scores at >=3 (high quality) and reports accuracy plus
/// recall on the low-quality class.
EvalResult classifier_eval(const std::vector<double>& predictions,
                           const std::vector<double>& labels);

using QualityScorer = std::function<double(const DocRecord&)>;

/// The bundled transparent scorer: a signal-weighted linear score in [0,5].
double default_quality_score(const DocRecord& doc);

struct ShardInfo {
  std::string path;  // relative to the output directory
  uint64_t docs = 0;
  std::string sha256;
};

struct ShardManifest {
  std::vector<ShardInfo> shards;
  uint64_t total_docs = 0;
};

/// Writes newline-delimited JSON shards of at most max_docs_per_shard records
/// plus a manifest.json. All writes go to temp names and rename into place,
/// manifest last, with rollback on failure — an aborted run leaves no partial
/// output. Returns the shard paths in order.
std::vector<std::filesystem::path> shard(const std::vector<DocRecord>& docs,
                                         size_t max_docs_per_shard,
                                         const std::filesystem::path& out_dir);

ShardManifest read_manifest(const std::filesystem::path& out_dir);

/// Reads shards in manifest order; the result reproduces the shard() input
/// order exactly. Verifies the per-shard digests.
std::vector<DocRecord> read_shards(const std::filesystem::path& out_dir);

}  // namespace tokkit::corpus
