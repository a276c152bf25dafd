#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tokkit/bpe.hpp"
#include "tokkit/script.hpp"

namespace tokkit::adapt {

struct AdaptConfig {
  script::ScriptClass target_script = script::ScriptClass::Hangul;
  /// How many low-utility non-target rules to try pruning on top of the
  /// target-script rules.
  size_t utility_budget = 0;
  /// Maximum allowed relative compression loss per guard domain.
  double guard_threshold = 0.01;
  /// Low-utility candidates are pruned greedily in batches of this size,
  /// each batch guard-checked and rolled back when it fails.
  size_t batch_size = 64;
};

/// A donor merge as byte strings, in donor priority order. Operand ids from
/// the donor vocabulary are meaningless in the base id space, so rules travel
/// as bytes.
struct DonorRule {
  std::string left;
  std::string right;

  bool operator==(const DonorRule&) const = default;
};

/// The donor's merge table in rank order, resolved to byte strings.
std::vector<DonorRule> donor_rules(const bpe::Vocab& donor);

enum class PruneReason { TargetScript, LowUtility, DependencyClosure };
std::string_view prune_reason_name(PruneReason reason);

struct Insertion {
  uint32_t rank;  // the vacated slot the rule landed in
  DonorRule rule;
};

struct SkippedDonor {
  DonorRule rule;
  std::string reason;  // "no-slots" | "operand-not-producible" | "result-collision"
};

struct GuardResult {
  double degradation;  // (rate_base - rate_candidate) / rate_base
  bool pass;
};

struct RateChange {
  double rate_base;
  double rate_candidate;
  double improvement;  // (rate_candidate - rate_base) / rate_base
};

struct AdaptationPlan {
  std::vector<uint32_t> pruned_ranks;  // ascending, closure included
  std::map<uint32_t, PruneReason> pruned_reason;
  std::vector<Insertion> inserted;
  std::vector<SkippedDonor> skipped_donor;
  std::map<std::string, GuardResult> guard_results;   // final guard, per domain
  std::map<std::string, RateChange> target_results;   // target domains, for audit
  bool accepted = true;
};

/// Canonical JSON for plan.json.
std::string plan_to_json(const AdaptationPlan& plan);

/// Ranks of all active merges whose result token contains at least one
/// decodable character of the given script. Partial byte fragments with no
/// decodable character never match.
std::set<uint32_t> detect_script_rules(const bpe::Vocab& vocab,
                                       script::ScriptClass script);

/// Merge firing counts over a reference corpus; defined (possibly zero) for
/// every active merge rank. Throws InvalidArgumentError on an empty corpus.
struct UtilityTable {
  std::map<uint32_t, uint64_t> counts;
};
UtilityTable usage_counts(const bpe::Vocab& vocab,
                          const std::vector<std::string>& corpus);

/// Removes the requested merges plus their dependency closure (anything that
/// consumes a removed result, transitively). Survivors keep their ranks.
/// Returns the new vocabulary and all vacated ranks in ascending order.
std::pair<bpe::Vocab, std::vector<uint32_t>> prune(const bpe::Vocab& vocab,
                                                   const std::set<uint32_t>& ranks);

struct SubstituteResult {
  bpe::Vocab vocab;
  std::vector<Insertion> inserted;
  std::vector<SkippedDonor> skipped;
};

/// Walks donor rules in order, assigning each eligible rule the next unused
/// vacated slot. Eligibility at slot s: both operand byte strings are
/// producible below rank s in the current vocabulary and the result bytes do
/// not collide with an active token. Result tokens recycle retired ids in
/// ascending order before fresh ids.
SubstituteResult substitute(const bpe::Vocab& vocab,
                            const std::vector<DonorRule>& donor,
                            const std::vector<uint32_t>& vacated);

/// Per-domain relative compression degradation of candidate vs base.
/// An improvement (negative degradation) always passes.
std::map<std::string, GuardResult> guard_check(
    const bpe::Vocab& base, const bpe::Vocab& candidate,
    const std::map<std::string, std::vector<std::string>>& domains,
    double threshold);

struct AdaptResult {
  bpe::Vocab vocab;
  AdaptationPlan plan;
};

/// Observer invoked with ("prune"|"substitute", vocab) after each pipeline
/// stage; tests hook the validator in here.
using StageObserver =
    std::function<void(std::string_view stage, const bpe::Vocab& vocab)>;

/// The full pipeline: target-script detection, utility-ranked batch pruning
/// with guard rollback, prune, substitution into vacated slots, final guard.
/// A failed final guard rejects the plan and returns the base vocabulary.
AdaptResult adapt(const bpe::Vocab& base, const std::vector<DonorRule>& donor,
                  const AdaptConfig& cfg,
                  const std::map<std::string, std::vector<std::string>>& target_corpora,
                  const std::map<std::string, std::vector<std::string>>& guard_corpora,
                  const std::vector<std::string>& reference_corpus,
                  const StageObserver& observer = {});

}  // namespace tokkit::adapt
