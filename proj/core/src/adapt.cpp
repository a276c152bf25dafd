#include "tokkit/adapt.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tokkit/bench.hpp"
#include "tokkit/errors.hpp"
#include "tokkit/unicode.hpp"
#include "tokkit/vocab_io.hpp"

namespace tokkit::adapt {

namespace {

using json = nlohmann::json;

json rule_to_json(const DonorRule& rule) {
  return json{{"left", vocab_io::base64_encode(rule.left)},
              {"right", vocab_io::base64_encode(rule.right)}};
}

bool bytes_contain_script(const std::string& bytes, script::ScriptClass target) {
  size_t offset = 0;
  while (offset < bytes.size()) {
    const auto dc = unicode::decode_char(bytes, offset);
    if (dc.valid && script::classify_char(dc.cp) == target) return true;
  }
  return false;
}

}  // namespace

std::vector<DonorRule> donor_rules(const bpe::Vocab& donor) {
  std::vector<DonorRule> rules;
  rules.reserve(donor.merge_count());
  for (const auto& [rank, rule] : donor.merges()) {
    rules.push_back(DonorRule{donor.token_bytes(rule.left),
                              donor.token_bytes(rule.right)});
  }
  return rules;
}

std::string_view prune_reason_name(PruneReason reason) {
  switch (reason) {
    case PruneReason::TargetScript:
      return "target-script";
    case PruneReason::LowUtility:
      return "low-utility";
    case PruneReason::DependencyClosure:
      return "dependency-closure";
  }
  return "unknown";
}

std::set<uint32_t> detect_script_rules(const bpe::Vocab& vocab,
                                       script::ScriptClass script) {
  std::set<uint32_t> ranks;
  for (const auto& [rank, rule] : vocab.merges()) {
    if (bytes_contain_script(vocab.token_bytes(rule.result), script)) {
      ranks.insert(rank);
    }
  }
  return ranks;
}

UtilityTable usage_counts(const bpe::Vocab& vocab,
                          const std::vector<std::string>& corpus) {
  if (corpus.empty()) {
    throw InvalidArgumentError("usage_counts needs a nonempty corpus");
  }
  bpe::FireCounts fires;
  for (const std::string& doc : corpus) bpe::encode(vocab, doc, fires);

  UtilityTable table;
  for (const auto& [rank, rule] : vocab.merges()) table.counts[rank] = 0;
  for (const auto& [rank, count] : fires) table.counts[rank] = count;
  return table;
}

std::pair<bpe::Vocab, std::vector<uint32_t>> prune(const bpe::Vocab& vocab,
                                                   const std::set<uint32_t>& ranks) {
  for (uint32_t rank : ranks) {
    if (!vocab.merges().count(rank)) {
      throw InvalidArgumentError("prune rank not active: " + std::to_string(rank));
    }
  }

  // One ascending pass collects the dependency closure: operands always come
  // from lower ranks, so removed results are known before their consumers.
  std::vector<uint32_t> vacated;
  std::set<bpe::TokenId> removed_results;
  for (const auto& [rank, rule] : vocab.merges()) {
    const bool requested = ranks.count(rank) > 0;
    const bool dangling = removed_results.count(rule.left) > 0 ||
                          removed_results.count(rule.right) > 0;
    if (requested || dangling) {
      vacated.push_back(rank);
      removed_results.insert(rule.result);
    }
  }

  bpe::Vocab pruned = vocab;
  pruned.remove_merges(vacated);
  return {std::move(pruned), std::move(vacated)};
}

SubstituteResult substitute(const bpe::Vocab& vocab,
                            const std::vector<DonorRule>& donor,
                            const std::vector<uint32_t>& vacated) {
  SubstituteResult result{vocab, {}, {}};
  bpe::Vocab& out = result.vocab;

  // Retired ids are recycled in ascending order.
  std::vector<bpe::TokenId> retired;
  for (bpe::TokenId id = bpe::kByteTokens; id < out.id_limit(); ++id) {
    if (!out.is_active(id)) retired.push_back(id);
  }
  size_t next_retired = 0;
  size_t next_slot = 0;

  auto producible_below = [&](const std::string& bytes,
                              uint32_t rank) -> std::optional<bpe::TokenId> {
    const auto id = out.find_token(bytes);
    if (!id) return std::nullopt;
    const auto producer = out.producer_rank(*id);
    if (producer && *producer >= rank) return std::nullopt;
    return id;
  };

  for (const DonorRule& rule : donor) {
    if (next_slot >= vacated.size()) {
      result.skipped.push_back({rule, "no-slots"});
      continue;
    }
    const uint32_t slot = vacated[next_slot];
    const auto left = producible_below(rule.left, slot);
    const auto right = producible_below(rule.right, slot);
    if (!left || !right) {
      result.skipped.push_back({rule, "operand-not-producible"});
      continue;
    }
    if (out.find_token(rule.left + rule.right)) {
      result.skipped.push_back({rule, "result-collision"});
      continue;
    }
    std::optional<bpe::TokenId> reuse;
    if (next_retired < retired.size()) reuse = retired[next_retired];
    out.insert_merge(*left, *right, slot, reuse);
    if (reuse) ++next_retired;
    result.inserted.push_back({slot, rule});
    ++next_slot;
  }
  return result;
}

std::map<std::string, GuardResult> guard_check(
    const bpe::Vocab& base, const bpe::Vocab& candidate,
    const std::map<std::string, std::vector<std::string>>& domains,
    double threshold) {
  if (domains.empty()) {
    throw InvalidArgumentError("guard_check needs at least one domain");
  }
  std::map<std::string, GuardResult> results;
  for (const auto& [name, docs] : domains) {
    const auto domain = bench::make_domain(name, docs);
    const double rate_base = bench::compression_rate(base, domain);
    const double rate_cand = bench::compression_rate(candidate, domain);
    const double degradation = (rate_base - rate_cand) / rate_base;
    results[name] = GuardResult{degradation, degradation < threshold};
  }
  return results;
}

AdaptResult adapt(const bpe::Vocab& base, const std::vector<DonorRule>& donor,
                  const AdaptConfig& cfg,
                  const std::map<std::string, std::vector<std::string>>& target_corpora,
                  const std::map<std::string, std::vector<std::string>>& guard_corpora,
                  const std::vector<std::string>& reference_corpus,
                  const StageObserver& observer) {
  if (cfg.guard_threshold <= 0.0 || cfg.guard_threshold >= 1.0) {
    throw InvalidArgumentError("guard_threshold must lie in (0,1)");
  }
  if (guard_corpora.empty()) {
    throw InvalidArgumentError("adapt needs at least one guard domain");
  }

  AdaptationPlan plan;
  const std::set<uint32_t> script_ranks =
      detect_script_rules(base, cfg.target_script);

  // Low-utility candidates: non-target rules ranked by how rarely they fire
  // on the reference corpus. Ties break toward the higher (colder) rank.
  std::set<uint32_t> accepted_lowutil;
  if (cfg.utility_budget > 0) {
    const UtilityTable utility = usage_counts(base, reference_corpus);
    std::vector<std::pair<uint64_t, uint32_t>> candidates;
    for (const auto& [rank, count] : utility.counts) {
      if (!script_ranks.count(rank)) candidates.emplace_back(count, rank);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return a.second > b.second;
              });
    if (candidates.size() > cfg.utility_budget) {
      candidates.resize(cfg.utility_budget);
    }

    const size_t batch = std::max<size_t>(1, cfg.batch_size);
    for (size_t begin = 0; begin < candidates.size(); begin += batch) {
      const size_t end = std::min(candidates.size(), begin + batch);
      std::set<uint32_t> trial_ranks = script_ranks;
      trial_ranks.insert(accepted_lowutil.begin(), accepted_lowutil.end());
      for (size_t i = begin; i < end; ++i) trial_ranks.insert(candidates[i].second);

      const auto [trial_vocab, _] = prune(base, trial_ranks);
      const auto results =
          guard_check(base, trial_vocab, guard_corpora, cfg.guard_threshold);
      const bool ok = std::all_of(results.begin(), results.end(),
                                  [](const auto& kv) { return kv.second.pass; });
      if (ok) {
        for (size_t i = begin; i < end; ++i) {
          accepted_lowutil.insert(candidates[i].second);
        }
      }
      // A failing batch is rolled back; later (hotter) batches still get
      // their chance, which keeps the scan deterministic.
    }
  }

  std::set<uint32_t> requested = script_ranks;
  requested.insert(accepted_lowutil.begin(), accepted_lowutil.end());

  auto [pruned_vocab, vacated] = prune(base, requested);
  if (observer) observer("prune", pruned_vocab);

  plan.pruned_ranks = vacated;
  for (uint32_t rank : vacated) {
    if (script_ranks.count(rank)) {
      plan.pruned_reason[rank] = PruneReason::TargetScript;
    } else if (accepted_lowutil.count(rank)) {
      plan.pruned_reason[rank] = PruneReason::LowUtility;
    } else {
      plan.pruned_reason[rank] = PruneReason::DependencyClosure;
    }
  }

  SubstituteResult sub = substitute(pruned_vocab, donor, vacated);
  if (observer) observer("substitute", sub.vocab);
  plan.inserted = std::move(sub.inserted);
  plan.skipped_donor = std::move(sub.skipped);

  plan.guard_results =
      guard_check(base, sub.vocab, guard_corpora, cfg.guard_threshold);
  plan.accepted = std::all_of(plan.guard_results.begin(), plan.guard_results.end(),
                              [](const auto& kv) { return kv.second.pass; });

  for (const auto& [name, docs] : target_corpora) {
    const auto domain = bench::make_domain(name, docs);
    const double rate_base = bench::compression_rate(base, domain);
    const double rate_cand = bench::compression_rate(sub.vocab, domain);
    plan.target_results[name] =
        RateChange{rate_base, rate_cand, (rate_cand - rate_base) / rate_base};
  }

  if (!plan.accepted) {
    return AdaptResult{base, std::move(plan)};
  }
  return AdaptResult{std::move(sub.vocab), std::move(plan)};
}

std::string plan_to_json(const AdaptationPlan& plan) {
  json doc;
  doc["status"] = plan.accepted ? "accepted" : "rejected";
  doc["pruned_ranks"] = plan.pruned_ranks;

  json reasons = json::object();
  for (const auto& [rank, reason] : plan.pruned_reason) {
    reasons[std::to_string(rank)] = std::string(prune_reason_name(reason));
  }
  doc["pruned_reason"] = std::move(reasons);

  json inserted = json::array();
  for (const Insertion& ins : plan.inserted) {
    json row = rule_to_json(ins.rule);
    row["rank"] = ins.rank;
    inserted.push_back(std::move(row));
  }
  doc["inserted"] = std::move(inserted);

  json skipped = json::array();
  for (const SkippedDonor& skip : plan.skipped_donor) {
    json row = rule_to_json(skip.rule);
    row["reason"] = skip.reason;
    skipped.push_back(std::move(row));
  }
  doc["skipped_donor"] = std::move(skipped);

  json guards = json::object();
  for (const auto& [name, result] : plan.guard_results) {
    guards[name] = json{{"degradation", result.degradation}, {"pass", result.pass}};
  }
  doc["guard_results"] = std::move(guards);

  json targets = json::object();
  for (const auto& [name, change] : plan.target_results) {
    targets[name] = json{{"rate_base", change.rate_base},
                         {"rate_candidate", change.rate_candidate},
                         {"improvement", change.improvement}};
  }
  doc["target_results"] = std::move(targets);

  return doc.dump();
}

}  // namespace tokkit::adapt
