#include "tokkit/bpe.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <unordered_set>

#include "tokkit/errors.hpp"
#include "tokkit/script.hpp"
#include "tokkit/unicode.hpp"

namespace tokkit::bpe {

namespace {

uint64_t pack_pair(TokenId left, TokenId right) {
  return (static_cast<uint64_t>(left) << 32) | right;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocab

Vocab Vocab::byte_base() {
  Vocab v;
  v.token_bytes_.reserve(kByteTokens);
  for (unsigned b = 0; b < kByteTokens; ++b) {
    v.token_bytes_.emplace_back(1, static_cast<char>(b));
    v.active_.push_back(1);
    v.producer_rank_.push_back(-1);
    v.bytes_index_.emplace(v.token_bytes_.back(), b);
  }
  v.active_count_ = kByteTokens;
  return v;
}

TokenId Vocab::add_merge(TokenId left, TokenId right) {
  const uint32_t rank = merges_.empty() ? 0 : merges_.rbegin()->first + 1;
  return insert_merge(left, right, rank);
}

TokenId Vocab::insert_merge(TokenId left, TokenId right, uint32_t rank,
                            std::optional<TokenId> reuse_id) {
  if (merges_.count(rank)) {
    throw InvalidArgumentError("merge rank already occupied: " +
                               std::to_string(rank));
  }
  auto producible_below = [&](TokenId id) {
    if (!is_active(id)) return false;
    const int64_t pr = producer_rank_[id];
    return pr < 0 || static_cast<uint32_t>(pr) < rank;
  };
  if (!producible_below(left) || !producible_below(right)) {
    throw InvalidArgumentError("merge operand not producible below rank " +
                               std::to_string(rank));
  }
  const std::string result_bytes = token_bytes_[left] + token_bytes_[right];
  if (bytes_index_.count(result_bytes)) {
    throw InvalidArgumentError("merge result collides with an active token");
  }

  TokenId id;
  if (reuse_id) {
    id = *reuse_id;
    if (id < kByteTokens || id >= token_bytes_.size() || active_[id]) {
      throw InvalidArgumentError("reuse id is not a retired token");
    }
    token_bytes_[id] = result_bytes;
  } else {
    id = static_cast<TokenId>(token_bytes_.size());
    token_bytes_.push_back(result_bytes);
    active_.push_back(0);
    producer_rank_.push_back(-1);
  }
  active_[id] = 1;
  producer_rank_[id] = rank;
  ++active_count_;
  merges_.emplace(rank, MergeRule{left, right, id, rank});
  pair_index_[pack_pair(left, right)] = {rank, id};
  bytes_index_.emplace(result_bytes, id);
  return id;
}

void Vocab::remove_merges(const std::vector<uint32_t>& ranks) {
  for (uint32_t rank : ranks) {
    auto it = merges_.find(rank);
    if (it == merges_.end()) {
      throw InvalidArgumentError("no merge at rank " + std::to_string(rank));
    }
    const MergeRule rule = it->second;
    merges_.erase(it);
    pair_index_.erase(pack_pair(rule.left, rule.right));
    bytes_index_.erase(token_bytes_[rule.result]);
    active_[rule.result] = 0;
    producer_rank_[rule.result] = -1;
    --active_count_;
  }
}

Vocab Vocab::restore(std::vector<MergeRule> merges) {
  Vocab v = byte_base();
  TokenId max_id = kByteTokens - 1;
  for (const MergeRule& m : merges) max_id = std::max(max_id, m.result);
  v.token_bytes_.resize(max_id + 1);
  v.active_.resize(max_id + 1, 0);
  v.producer_rank_.resize(max_id + 1, -1);

  std::sort(merges.begin(), merges.end(),
            [](const MergeRule& a, const MergeRule& b) { return a.rank < b.rank; });
  for (const MergeRule& m : merges) {
    if (v.merges_.count(m.rank)) {
      throw InvalidArgumentError("duplicate merge rank " + std::to_string(m.rank));
    }
    for (TokenId operand : {m.left, m.right}) {
      if (!v.is_active(operand)) {
        throw InvalidArgumentError("merge operand " + std::to_string(operand) +
                                   " is not produced before rank " +
                                   std::to_string(m.rank));
      }
      const int64_t pr = v.producer_rank_[operand];
      if (pr >= 0 && static_cast<uint32_t>(pr) >= m.rank) {
        throw InvalidArgumentError("merge table violates dependency order");
      }
    }
    if (m.result < kByteTokens || v.active_[m.result]) {
      throw InvalidArgumentError("merge result id invalid or reused: " +
                                 std::to_string(m.result));
    }
    std::string bytes = v.token_bytes_[m.left] + v.token_bytes_[m.right];
    if (v.bytes_index_.count(bytes)) {
      throw InvalidArgumentError("two merges produce the same byte string");
    }
    v.token_bytes_[m.result] = bytes;
    v.active_[m.result] = 1;
    v.producer_rank_[m.result] = m.rank;
    ++v.active_count_;
    v.merges_.emplace(m.rank, m);
    v.pair_index_[pack_pair(m.left, m.right)] = {m.rank, m.result};
    v.bytes_index_.emplace(std::move(bytes), m.result);
  }
  return v;
}

bool Vocab::operator==(const Vocab& other) const {
  if (merges_ != other.merges_ || active_count_ != other.active_count_) {
    return false;
  }
  const TokenId limit = std::max(id_limit(), other.id_limit());
  for (TokenId id = 0; id < limit; ++id) {
    if (is_active(id) != other.is_active(id)) return false;
    if (is_active(id) && token_bytes_[id] != other.token_bytes_[id]) return false;
  }
  return true;
}

const std::string& Vocab::token_bytes(TokenId id) const {
  if (!is_active(id)) {
    throw InvalidTokenError("token id not active: " + std::to_string(id));
  }
  return token_bytes_[id];
}

std::optional<TokenId> Vocab::find_token(std::string_view bytes) const {
  auto it = bytes_index_.find(std::string(bytes));
  if (it == bytes_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<MergeRule> Vocab::find_merge(TokenId left, TokenId right) const {
  auto it = pair_index_.find(pack_pair(left, right));
  if (it == pair_index_.end()) return std::nullopt;
  return merges_.at(it->second.first);
}

std::optional<uint32_t> Vocab::producer_rank(TokenId id) const {
  if (!is_active(id)) return std::nullopt;
  const int64_t pr = producer_rank_[id];
  if (pr < 0) return std::nullopt;
  return static_cast<uint32_t>(pr);
}

void Vocab::validate() const {
  auto fail = [](const std::string& what) { throw InternalError("vocab invariant: " + what); };

  if (token_bytes_.size() < kByteTokens) fail("missing base byte tokens");
  for (TokenId id = 0; id < kByteTokens; ++id) {
    if (!active_[id]) fail("base token retired: " + std::to_string(id));
    if (token_bytes_[id].size() != 1 ||
        static_cast<unsigned char>(token_bytes_[id][0]) != id)
      fail("base token bytes corrupt");
    if (producer_rank_[id] != -1) fail("base token has a producer");
  }

  std::unordered_map<std::string, TokenId> seen_bytes;
  size_t active_seen = 0;
  std::vector<uint64_t> producers_per_id(token_bytes_.size(), 0);

  for (const auto& [rank, rule] : merges_) {
    if (rule.rank != rank) fail("rank key mismatch");
    for (TokenId operand : {rule.left, rule.right}) {
      if (!is_active(operand)) fail("merge operand inactive");
      const int64_t pr = producer_rank_[operand];
      if (pr >= 0 && static_cast<uint32_t>(pr) >= rank)
        fail("dependency order violated at rank " + std::to_string(rank));
    }
    if (!is_active(rule.result)) fail("merge result inactive");
    if (token_bytes_[rule.result] !=
        token_bytes_[rule.left] + token_bytes_[rule.right])
      fail("result bytes are not the operand concatenation");
    if (producer_rank_[rule.result] != static_cast<int64_t>(rank))
      fail("producer index out of sync");
    producers_per_id[rule.result] += 1;
  }

  for (TokenId id = 0; id < token_bytes_.size(); ++id) {
    if (!active_[id]) continue;
    ++active_seen;
    if (!seen_bytes.emplace(token_bytes_[id], id).second)
      fail("two active tokens share bytes");
    if (id >= kByteTokens && producers_per_id[id] != 1)
      fail("active non-base token without exactly one producing merge");
  }
  if (active_seen != active_count_) fail("active count out of sync");
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

struct EncodeNode {
  TokenId id;
  int32_t prev;
  int32_t next;
  uint32_t start;  // byte offset of the node's first byte within the pretoken
  bool alive;
};

struct PairCandidate {
  uint32_t rank;
  uint32_t start;
  int32_t node;
};

struct CandidateOrder {
  bool operator()(const PairCandidate& a, const PairCandidate& b) const {
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.start > b.start;  // leftmost occurrence first on rank ties
  }
};

void encode_pretoken(const Vocab& vocab, std::string_view pretoken,
                     std::vector<TokenId>& out, FireCounts* fires) {
  const size_t n = pretoken.size();
  if (n == 0) return;
  if (n == 1) {
    out.push_back(static_cast<unsigned char>(pretoken[0]));
    return;
  }

  std::vector<EncodeNode> nodes(n);
  for (size_t i = 0; i < n; ++i) {
    nodes[i] = {static_cast<unsigned char>(pretoken[i]),
                static_cast<int32_t>(i) - 1,
                i + 1 < n ? static_cast<int32_t>(i) + 1 : -1,
                static_cast<uint32_t>(i), true};
  }

  std::priority_queue<PairCandidate, std::vector<PairCandidate>, CandidateOrder>
      heap;
  auto push_pair = [&](int32_t i) {
    if (i < 0 || nodes[i].next < 0) return;
    const auto merge = vocab.find_merge(nodes[i].id, nodes[nodes[i].next].id);
    if (merge) heap.push({merge->rank, nodes[i].start, i});
  };
  for (size_t i = 0; i + 1 < n; ++i) push_pair(static_cast<int32_t>(i));

  while (!heap.empty()) {
    const PairCandidate cand = heap.top();
    heap.pop();
    const int32_t i = cand.node;
    if (!nodes[i].alive || nodes[i].next < 0) continue;
    const int32_t j = nodes[i].next;
    const auto merge = vocab.find_merge(nodes[i].id, nodes[j].id);
    if (!merge || merge->rank != cand.rank) continue;  // stale entry

    nodes[i].id = merge->result;
    nodes[j].alive = false;
    nodes[i].next = nodes[j].next;
    if (nodes[i].next >= 0) nodes[nodes[i].next].prev = i;
    if (fires) (*fires)[merge->rank] += 1;

    push_pair(nodes[i].prev);
    push_pair(i);
  }

  for (int32_t i = 0; i >= 0; i = nodes[i].next) out.push_back(nodes[i].id);
}

std::vector<TokenId> encode_impl(const Vocab& vocab, std::string_view text,
                                 FireCounts* fires) {
  std::vector<TokenId> out;
  for (const std::string& pretoken : script::pretokenize(text)) {
    encode_pretoken(vocab, pretoken, out, fires);
  }
  return out;
}

}  // namespace

std::vector<TokenId> encode(const Vocab& vocab, std::string_view text) {
  return encode_impl(vocab, text, nullptr);
}

std::vector<TokenId> encode(const Vocab& vocab, std::string_view text,
                            FireCounts& fires) {
  return encode_impl(vocab, text, &fires);
}

DecodeResult decode(const Vocab& vocab, const std::vector<TokenId>& ids) {
  std::string bytes;
  for (TokenId id : ids) bytes += vocab.token_bytes(id);
  DecodeResult result;
  result.text = unicode::sanitize_utf8(bytes, result.lossy);
  return result;
}

std::vector<TokenId> encode_stochastic(const Vocab& vocab, std::string_view text,
                                       const StochasticConfig& cfg) {
  if (cfg.p < 0.0 || cfg.p > 1.0) {
    throw InvalidArgumentError("split probability must be in [0,1]");
  }
  const std::vector<TokenId> ids = encode(vocab, text);

  std::mt19937_64 rng(cfg.seed);
  // 53-bit uniform draw in [0,1); the engine's output sequence is pinned by
  // the standard.
  auto draw = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  std::vector<TokenId> out;
  out.reserve(ids.size());
  for (TokenId id : ids) {
    const auto rank = vocab.producer_rank(id);
    if (rank && draw() < cfg.p) {
      const MergeRule& rule = vocab.merges().at(*rank);
      out.push_back(rule.left);
      out.push_back(rule.right);
    } else {
      out.push_back(id);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct HeapEntry {
  int64_t count;
  std::string left_bytes;
  std::string right_bytes;
  uint64_t key;
};

struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.count != b.count) return a.count < b.count;
    if (a.left_bytes != b.left_bytes) return a.left_bytes > b.left_bytes;
    return a.right_bytes > b.right_bytes;
  }
};

struct Word {
  std::vector<TokenId> symbols;
  int64_t freq;
};

// Pair occurrence bookkeeping over the distinct-pretoken list.
struct PairStats {
  std::unordered_map<uint64_t, int64_t> counts;
  std::unordered_map<uint64_t, std::unordered_set<int32_t>> where;

  void add(uint64_t key, int64_t delta, int32_t word_idx) {
    counts[key] += delta;
    if (delta > 0) where[key].insert(word_idx);
  }
};

void count_word_pairs(const Word& word, int32_t idx, PairStats& stats) {
  for (size_t i = 0; i + 1 < word.symbols.size(); ++i) {
    stats.add(pack_pair(word.symbols[i], word.symbols[i + 1]), word.freq, idx);
  }
}

}  // namespace

TrainResult train(const std::vector<std::string>& corpus, size_t target_size) {
  if (target_size < kByteTokens) {
    throw InvalidArgumentError("target_size must be at least 256");
  }
  if (corpus.empty()) {
    throw InvalidArgumentError("training corpus is empty");
  }

  // Distinct pretokens with frequencies; merges never cross their boundaries.
  std::unordered_map<std::string, int32_t> word_index;
  std::vector<Word> words;
  for (const std::string& doc : corpus) {
    for (std::string& pretoken : script::pretokenize(doc)) {
      auto [it, inserted] =
          word_index.emplace(pretoken, static_cast<int32_t>(words.size()));
      if (inserted) {
        Word w;
        w.symbols.reserve(pretoken.size());
        for (char c : pretoken) {
          w.symbols.push_back(static_cast<unsigned char>(c));
        }
        w.freq = 0;
        words.push_back(std::move(w));
      }
      words[it->second].freq += 1;
    }
  }

  PairStats stats;
  for (int32_t i = 0; i < static_cast<int32_t>(words.size()); ++i) {
    count_word_pairs(words[i], i, stats);
  }

  Vocab vocab = Vocab::byte_base();
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
  auto push_entry = [&](uint64_t key, int64_t count) {
    if (count < 2) return;
    const TokenId left = static_cast<TokenId>(key >> 32);
    const TokenId right = static_cast<TokenId>(key & 0xFFFFFFFFu);
    heap.push({count, vocab.token_bytes(left), vocab.token_bytes(right), key});
  };
  for (const auto& [key, count] : stats.counts) push_entry(key, count);

  const size_t wanted = target_size - kByteTokens;
  bool exhausted = false;

  while (vocab.merge_count() < wanted) {
    // Pop until an entry matches the live count; stale entries are discarded.
    uint64_t best_key = 0;
    bool found = false;
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      auto it = stats.counts.find(top.key);
      const int64_t live = it == stats.counts.end() ? 0 : it->second;
      if (live != top.count || live < 2) {
        heap.pop();
        if (live >= 2) push_entry(top.key, live);
        continue;
      }
      // A pair whose result bytes already name a token (reachable through an
      // earlier merge chain) cannot enter the vocabulary: injectivity.
      if (vocab.find_token(top.left_bytes + top.right_bytes)) {
        heap.pop();
        stats.counts.erase(top.key);
        continue;
      }
      best_key = top.key;
      found = true;
      break;
    }
    if (!found) {
      exhausted = true;
      break;
    }

    const TokenId left = static_cast<TokenId>(best_key >> 32);
    const TokenId right = static_cast<TokenId>(best_key & 0xFFFFFFFFu);
    const TokenId result = vocab.add_merge(left, right);

    // Rewrite every word containing the pair, updating pair stats around
    // each replacement. Occurrences merge left to right, matching encode.
    const auto touched = stats.where[best_key];
    for (int32_t widx : touched) {
      Word& word = words[widx];
      std::vector<TokenId>& sym = word.symbols;

      bool contains = false;
      for (size_t i = 0; i + 1 < sym.size(); ++i) {
        if (sym[i] == left && sym[i + 1] == right) {
          contains = true;
          break;
        }
      }
      if (!contains) continue;

      for (size_t i = 0; i + 1 < sym.size(); ++i) {
        stats.add(pack_pair(sym[i], sym[i + 1]), -word.freq, widx);
      }
      std::vector<TokenId> next;
      next.reserve(sym.size());
      size_t i = 0;
      while (i < sym.size()) {
        if (i + 1 < sym.size() && sym[i] == left && sym[i + 1] == right) {
          next.push_back(result);
          i += 2;
        } else {
          next.push_back(sym[i]);
          i += 1;
        }
      }
      sym = std::move(next);
      for (size_t k = 0; k + 1 < sym.size(); ++k) {
        const uint64_t key = pack_pair(sym[k], sym[k + 1]);
        stats.add(key, word.freq, widx);
        push_entry(key, stats.counts[key]);
      }
    }
    stats.counts.erase(best_key);
    stats.where.erase(best_key);
  }

  return TrainResult{std::move(vocab), exhausted};
}

}  // namespace tokkit::bpe
