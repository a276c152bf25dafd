#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokkit::bpe {

using TokenId = uint32_t;

/// Ids 0..255 are the single-byte base tokens and are never retired.
inline constexpr TokenId kByteTokens = 256;

/// A merge rule: left + right concatenate into result. Lower rank fires first
/// during encoding. Ranks are unique within a vocabulary; gaps are legal
/// (pruning vacates slots without renumbering the survivors).
struct MergeRule {
  TokenId left;
  TokenId right;
  TokenId result;
  uint32_t rank;

  bool operator==(const MergeRule&) const = default;
};

/// Byte-level BPE vocabulary: 256 base byte tokens plus rank-ordered merges.
///
/// Invariants (checked by validate()):
///  - token bytes are injective over active ids
///  - every active non-base token is the result of exactly one merge
///  - merge operands are base tokens or results of strictly lower-ranked merges
class Vocab {
public:
  /// The 256 single-byte tokens and no merges.
  static Vocab byte_base();

  /// Appends a merge at the next free rank after all existing ones.
  /// Returns the fresh result id.
  TokenId add_merge(TokenId left, TokenId right);

  /// Inserts a merge at an explicit (vacant) rank. If reuse_id is given it
  /// must be a retired non-base id; otherwise a fresh id is allocated.
  /// Throws InvalidArgumentError when the slot is taken, an operand is not
  /// producible below `rank`, or the result bytes collide with an active token.
  TokenId insert_merge(TokenId left, TokenId right, uint32_t rank,
                       std::optional<TokenId> reuse_id = std::nullopt);

  /// Removes exactly the given ranks and retires their result tokens. The
  /// caller is responsible for closure; validate() will flag dangling merges.
  void remove_merges(const std::vector<uint32_t>& ranks);

  /// Rebuilds a vocabulary from an explicit merge table (deserialization).
  /// Result ids may be sparse; the id space is sized to the largest one.
  /// Throws InvalidArgumentError when the table violates vocab invariants.
  static Vocab restore(std::vector<MergeRule> merges);

  const std::map<uint32_t, MergeRule>& merges() const { return merges_; }
  size_t merge_count() const { return merges_.size(); }

  bool is_active(TokenId id) const {
    return id < active_.size() && active_[id];
  }
  size_t active_token_count() const { return active_count_; }

  /// One past the largest id ever allocated (retired ids included).
  TokenId id_limit() const { return static_cast<TokenId>(token_bytes_.size()); }

  /// Byte string of an active token. Throws InvalidTokenError otherwise.
  const std::string& token_bytes(TokenId id) const;

  /// Active token with exactly these bytes, if any.
  std::optional<TokenId> find_token(std::string_view bytes) const;

  /// Active merge rule for the ordered pair, if any.
  std::optional<MergeRule> find_merge(TokenId left, TokenId right) const;

  /// Rank of the merge producing `id`, or nullopt for base tokens.
  std::optional<uint32_t> producer_rank(TokenId id) const;

  /// Throws InternalError with a description of the first violated invariant.
  void validate() const;

  /// Observable equality: same merge table and same active tokens. Retired
  /// id slots are allocation bookkeeping and do not participate.
  bool operator==(const Vocab& other) const;

private:
  Vocab() = default;

  std::map<uint32_t, MergeRule> merges_;  // rank → rule
  std::vector<std::string> token_bytes_;  // indexed by id; stale for retired ids
  std::vector<uint8_t> active_;
  std::vector<int64_t> producer_rank_;  // -1 = base token or retired
  std::unordered_map<uint64_t, std::pair<uint32_t, TokenId>> pair_index_;
  std::unordered_map<std::string, TokenId> bytes_index_;
  size_t active_count_ = 0;
};

struct TrainResult {
  Vocab vocab;
  /// True when the corpus ran out of pairs occurring at least twice before
  /// the requested size was reached.
  bool exhausted = false;
};

/// Learns (target_size - 256) merges by iterative most-frequent-pair counting
/// over the pretokenized corpus. Merges never span pretoken boundaries. Count
/// ties break on lexicographically smaller (left bytes, right bytes).
/// Throws InvalidArgumentError for target_size < 256 or an empty corpus.
TrainResult train(const std::vector<std::string>& corpus, size_t target_size);

/// Cumulative merge-firing counts, keyed by rank. Used for utility ranking.
using FireCounts = std::unordered_map<uint32_t, uint64_t>;

/// Deterministic encoding: per pretoken, start from bytes and repeatedly apply
/// the lowest-ranked applicable merge, leftmost occurrence first.
std::vector<TokenId> encode(const Vocab& vocab, std::string_view text);

/// Same as encode but also counts how often each merge fires.
std::vector<TokenId> encode(const Vocab& vocab, std::string_view text,
                            FireCounts& fires);

struct DecodeResult {
  std::string text;
  /// True when the byte concatenation was not valid UTF-8 and replacement
  /// characters were substituted.
  bool lossy = false;
};

/// Concatenates token bytes and decodes as UTF-8.
/// Throws InvalidTokenError for ids not active in the vocabulary.
DecodeResult decode(const Vocab& vocab, const std::vector<TokenId>& ids);

struct StochasticConfig {
  double p = 0.0;     // per-token split probability, in [0,1]
  uint64_t seed = 0;  // drives the deterministic generator
};

/// Regularized encoding: each merge-produced token of the deterministic
/// encoding is independently un-merged one level (back into its defining
/// merge's operand pair) with probability cfg.p. p=0 reproduces encode
/// exactly; decode of the result always equals the input text.
std::vector<TokenId> encode_stochastic(const Vocab& vocab, std::string_view text,
                                       const StochasticConfig& cfg);

}  // namespace tokkit::bpe
