// tokkit — tokenizer construction, vocabulary adaptation, corpus curation,
// and chat wire-format utilities behind one command-line entry point.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tokkit/adapt.hpp"
#include "tokkit/bench.hpp"
#include "tokkit/bpe.hpp"
#include "tokkit/chatml.hpp"
#include "tokkit/corpus.hpp"
#include "tokkit/errors.hpp"
#include "tokkit/script.hpp"
#include "tokkit/vocab_io.hpp"

namespace fs = std::filesystem;
using tokkit::Error;
using tokkit::IoError;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, const std::string& payload) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << payload;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename into place: " + path.string());
  }
}

// A corpus path is a text file (one document), a .jsonl file (one document
// per line under a "text" field), or a directory of those.
std::vector<std::string> read_corpus(const fs::path& path) {
  std::vector<std::string> docs;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw IoError("corpus path does not exist: " + path.string());
  }

  for (const fs::path& file : files) {
    const std::string payload = read_file(file);
    if (file.extension() == ".jsonl") {
      std::istringstream lines(payload);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        try {
          docs.push_back(nlohmann::json::parse(line).at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
          throw tokkit::ConfigError("bad jsonl record in " + file.string() + ": " +
                                    e.what());
        }
      }
    } else {
      docs.push_back(payload);
    }
  }
  return docs;
}

std::pair<std::string, std::string> split_name_path(const std::string& arg,
                                                    const char* what) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw tokkit::ConfigError(std::string(what) + " must look like name=path: " + arg);
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::map<std::string, std::vector<std::string>> read_domain_map(
    const std::vector<std::string>& args, const char* what) {
  std::map<std::string, std::vector<std::string>> domains;
  for (const std::string& arg : args) {
    const auto [name, path] = split_name_path(arg, what);
    domains[name] = read_corpus(path);
  }
  return domains;
}

// ---------------------------------------------------------------------------

int run_train(const std::vector<std::string>& corpus_args, size_t target_size,
              const std::string& out) {
  std::vector<std::string> corpus;
  for (const std::string& arg : corpus_args) {
    for (auto& doc : read_corpus(arg)) corpus.push_back(std::move(doc));
  }
  const auto result = tokkit::bpe::train(corpus, target_size);
  tokkit::vocab_io::save(result.vocab, out);
  std::cout << "trained " << result.vocab.merge_count() << " merges ("
            << result.vocab.active_token_count() << " active tokens)\n";
  if (result.exhausted) {
    std::cout << "warning: corpus exhausted before reaching target size "
              << target_size << "\n";
  }
  return 0;
}

int run_encode(const std::string& vocab_path, double stochastic_p, uint64_t seed) {
  const auto vocab = tokkit::vocab_io::load(vocab_path);
  std::string text((std::istreambuf_iterator<char>(std::cin)),
                   std::istreambuf_iterator<char>());
  std::vector<tokkit::bpe::TokenId> ids;
  if (stochastic_p > 0.0) {
    ids = tokkit::bpe::encode_stochastic(vocab, text, {stochastic_p, seed});
  } else {
    ids = tokkit::bpe::encode(vocab, text);
  }
  for (const auto id : ids) std::cout << id << '\n';
  return 0;
}

int run_decode(const std::string& vocab_path) {
  const auto vocab = tokkit::vocab_io::load(vocab_path);
  std::vector<tokkit::bpe::TokenId> ids;
  uint64_t id = 0;
  while (std::cin >> id) ids.push_back(static_cast<tokkit::bpe::TokenId>(id));
  const auto result = tokkit::bpe::decode(vocab, ids);
  if (result.lossy) {
    std::cerr << "warning: token bytes were not valid UTF-8; replacement "
                 "characters substituted\n";
  }
  std::cout << result.text;
  return 0;
}

int run_adapt(const std::string& base_path, const std::string& donor_path,
              const std::string& target_script, size_t budget, double threshold,
              size_t batch_size, const std::vector<std::string>& target_args,
              const std::vector<std::string>& guard_args,
              const std::string& reference_path, const std::string& out,
              const std::string& plan_out) {
  const auto base = tokkit::vocab_io::load(base_path);
  std::vector<tokkit::adapt::DonorRule> donor;
  if (!donor_path.empty()) {
    donor = tokkit::adapt::donor_rules(tokkit::vocab_io::load(donor_path));
  }

  tokkit::adapt::AdaptConfig cfg;
  cfg.target_script = tokkit::script::script_class_from_name(target_script);
  cfg.utility_budget = budget;
  cfg.guard_threshold = threshold;
  cfg.batch_size = batch_size;

  const auto targets = read_domain_map(target_args, "--target");
  const auto guards = read_domain_map(guard_args, "--guard");
  std::vector<std::string> reference;
  if (!reference_path.empty()) reference = read_corpus(reference_path);

  const auto result = tokkit::adapt::adapt(base, donor, cfg, targets, guards, reference);
  tokkit::vocab_io::save(result.vocab, out);
  write_file_atomic(plan_out, tokkit::adapt::plan_to_json(result.plan));

  std::cout << "adaptation " << (result.plan.accepted ? "accepted" : "rejected")
            << ": pruned " << result.plan.pruned_ranks.size() << ", inserted "
            << result.plan.inserted.size() << ", skipped "
            << result.plan.skipped_donor.size() << "\n";
  for (const auto& [name, guard] : result.plan.guard_results) {
    std::cout << "guard " << name << ": degradation "
              << tokkit::bench::format_rate(guard.degradation) << " "
              << (guard.pass ? "pass" : "FAIL") << "\n";
  }
  for (const auto& [name, change] : result.plan.target_results) {
    std::cout << "target " << name << ": "
              << tokkit::bench::format_rate(change.rate_base) << " -> "
              << tokkit::bench::format_rate(change.rate_candidate) << "\n";
  }
  return 0;
}

int run_bench(const std::vector<std::string>& vocab_args,
              const std::vector<std::string>& domain_args,
              const std::string& json_out) {
  std::map<std::string, tokkit::bpe::Vocab> tokenizers;
  for (const std::string& arg : vocab_args) {
    const auto [name, path] = split_name_path(arg, "--vocab");
    tokenizers.emplace(name, tokkit::vocab_io::load(path));
  }
  std::vector<tokkit::bench::DomainCorpus> domains;
  for (const std::string& arg : domain_args) {
    const auto [name, path] = split_name_path(arg, "--domain");
    domains.push_back(tokkit::bench::make_domain(name, read_corpus(path)));
  }
  const auto report = tokkit::bench::report(tokenizers, domains);
  std::cout << tokkit::bench::render_table(report);
  if (!json_out.empty()) {
    write_file_atomic(json_out, tokkit::bench::to_json(report));
  }
  return 0;
}

struct CurateOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  size_t max_docs_per_shard = 1000;
  std::string preset = "low-quality-removal";
  std::vector<std::string> threshold_overrides;  // name=min:max
  bool no_score = false;
  bool no_mask = false;
  bool no_dedup = false;
  size_t minhash_k = 128;
  size_t shingle_n = 5;
  size_t bands = 16;
  double dedup_threshold = 0.8;
  uint64_t seed = 0;
};

int run_curate(const CurateOptions& opt) {
  namespace corpus = tokkit::corpus;

  auto thresholds = corpus::preset(opt.preset);
  for (const std::string& arg : opt.threshold_overrides) {
    const auto [name, bounds] = split_name_path(arg, "--threshold");
    const auto colon = bounds.find(':');
    if (colon == std::string::npos) {
      throw tokkit::ConfigError("--threshold needs name=min:max, got: " + arg);
    }
    thresholds[name] = {std::stod(bounds.substr(0, colon)),
                        std::stod(bounds.substr(colon + 1))};
  }

  std::vector<std::string> raw;
  for (const std::string& input : opt.inputs) {
    for (auto& doc : read_corpus(input)) raw.push_back(std::move(doc));
  }

  size_t empty_docs = 0, dropped = 0, masked = 0;
  std::vector<corpus::DocRecord> docs;
  for (const std::string& text : raw) {
    corpus::DocRecord doc;
    try {
      doc = corpus::normalize(text, "input");
    } catch (const tokkit::EmptyDocumentError&) {
      ++empty_docs;
      continue;
    }
    doc.signals.merge(corpus::heuristic_signals(doc));
    if (!opt.no_score) doc.quality_score = corpus::default_quality_score(doc);
    if (!corpus::filter(doc, thresholds).keep) {
      ++dropped;
      continue;
    }
    doc = corpus::mask_pii(std::move(doc),
                           opt.no_mask ? std::vector<corpus::PiiPattern>{}
                                       : corpus::default_pii_patterns());
    if (doc.pii_masked) ++masked;
    docs.push_back(std::move(doc));
  }

  size_t before_dedup = docs.size();
  if (!opt.no_dedup) {
    corpus::DedupParams params;
    params.k = opt.minhash_k;
    params.shingle_n = opt.shingle_n;
    params.bands = opt.bands;
    params.threshold = opt.dedup_threshold;
    params.seed = opt.seed;
    docs = corpus::dedup(docs, params);
  }

  const auto paths = corpus::shard(docs, opt.max_docs_per_shard, opt.out_dir);

  std::cout << "input docs:      " << raw.size() << "\n"
            << "empty:           " << empty_docs << "\n"
            << "filtered out:    " << dropped << "\n"
            << "pii masked:      " << masked << "\n"
            << "near-duplicates: " << before_dedup - docs.size() << "\n"
            << "written:         " << docs.size() << " docs in " << paths.size()
            << " shards\n";
  return 0;
}

int run_render(const std::string& conversation_path, const std::string& tools_path,
               const std::string& mode_name, bool generation_prompt) {
  const auto messages = tokkit::chatml::messages_from_json(read_file(conversation_path));
  std::vector<tokkit::chatml::ToolSpec> tools;
  if (!tools_path.empty()) {
    tools = tokkit::chatml::tools_from_json(read_file(tools_path));
  }
  tokkit::chatml::RenderMode mode;
  if (mode_name == "reasoning") {
    mode = tokkit::chatml::RenderMode::Reasoning;
  } else if (mode_name == "non_reasoning") {
    mode = tokkit::chatml::RenderMode::NonReasoning;
  } else {
    throw tokkit::ConfigError("--mode must be reasoning or non_reasoning");
  }
  std::cout << tokkit::chatml::render(messages, tools, mode, generation_prompt);
  return 0;
}

int run_inspect(const std::string& vocab_path) {
  const auto vocab = tokkit::vocab_io::load(vocab_path);
  vocab.validate();
  std::cout << "merges:        " << vocab.merge_count() << "\n"
            << "active tokens: " << vocab.active_token_count() << "\n"
            << "id limit:      " << vocab.id_limit() << "\n";
  if (!vocab.merges().empty()) {
    std::cout << "rank range:    [" << vocab.merges().begin()->first << ", "
              << vocab.merges().rbegin()->first << "]\n";
  }
  std::cout << "script rule counts:\n";
  for (size_t i = 0; i < tokkit::script::kScriptClassCount; ++i) {
    const auto sc = static_cast<tokkit::script::ScriptClass>(i);
    const auto ranks = tokkit::adapt::detect_script_rules(vocab, sc);
    if (!ranks.empty()) {
      std::cout << "  " << tokkit::script::script_class_name(sc) << ": "
                << ranks.size() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"byte-level BPE tokenizer toolkit: training, script-aware "
               "pre-tokenization, vocabulary adaptation, compression "
               "benchmarking, corpus curation, and chat wire formatting"};
  app.require_subcommand(1);
  app.set_config("--config");

  uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for all stochastic behavior")
      ->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Learn a BPE vocabulary from a corpus");
  std::vector<std::string> train_corpus;
  size_t target_size = 0;
  std::string train_out;
  train->add_option("--corpus", train_corpus, "Corpus file/dir (repeatable)")
      ->required();
  train->add_option("--target-size", target_size, "Total vocabulary size")
      ->required();
  train->add_option("--out", train_out, "Output vocabulary file")->required();

  // encode / decode
  auto* encode = app.add_subcommand("encode", "Encode stdin text to token ids");
  std::string encode_vocab;
  double stochastic_p = 0.0;
  encode->add_option("--vocab", encode_vocab, "Vocabulary file")->required();
  encode->add_option("--stochastic-p", stochastic_p,
                     "StoChasTok split probability (0 disables)")
      ->capture_default_str();

  auto* decode = app.add_subcommand("decode", "Decode token ids from stdin");
  std::string decode_vocab;
  decode->add_option("--vocab", decode_vocab, "Vocabulary file")->required();

  // adapt
  auto* adapt = app.add_subcommand(
      "adapt", "Prune target-script and low-utility rules, substitute donor rules");
  std::string base_path, donor_path, reference_path, adapt_out, plan_out;
  std::string target_script = "Hangul";
  size_t budget = 0, batch_size = 64;
  double guard_threshold = 0.01;
  std::vector<std::string> target_args, guard_args;
  adapt->add_option("--base", base_path, "Base vocabulary")->required();
  adapt->add_option("--donor", donor_path, "Donor vocabulary (optional)");
  adapt->add_option("--target-script", target_script, "Target script class")
      ->capture_default_str();
  adapt->add_option("--budget", budget, "Low-utility rules to try pruning")
      ->capture_default_str();
  adapt->add_option("--guard-threshold", guard_threshold,
                    "Maximum relative degradation per guard domain")
      ->capture_default_str();
  adapt->add_option("--batch-size", batch_size, "Greedy pruning batch size")
      ->capture_default_str();
  adapt->add_option("--target", target_args, "Target domain name=path (repeatable)")
      ->required();
  adapt->add_option("--guard", guard_args, "Guard domain name=path (repeatable)")
      ->required();
  adapt->add_option("--reference", reference_path,
                    "Reference corpus for utility counting");
  adapt->add_option("--out", adapt_out, "Adapted vocabulary output")->required();
  adapt->add_option("--plan", plan_out, "Adaptation plan output (plan.json)")
      ->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Chars-per-token compression report");
  std::vector<std::string> bench_vocabs, bench_domains;
  std::string bench_json;
  bench->add_option("--vocab", bench_vocabs, "Tokenizer name=path (repeatable)")
      ->required();
  bench->add_option("--domain", bench_domains, "Domain name=path (repeatable)")
      ->required();
  bench->add_option("--json", bench_json, "Also write the report as JSON");

  // curate
  auto* curate = app.add_subcommand(
      "curate", "Normalize, filter, mask, dedup, and shard a document set");
  CurateOptions copt;
  curate->add_option("--input", copt.inputs, "Input file/dir (repeatable)")
      ->required();
  curate->add_option("--out", copt.out_dir, "Output shard directory")->required();
  curate->add_option("--max-docs-per-shard", copt.max_docs_per_shard)
      ->capture_default_str();
  curate->add_option("--preset", copt.preset, "Filter threshold preset")
      ->capture_default_str();
  curate->add_option("--threshold", copt.threshold_overrides,
                     "Override a threshold: name=min:max (repeatable)");
  curate->add_flag("--no-score", copt.no_score, "Skip the bundled quality scorer");
  curate->add_flag("--no-mask", copt.no_mask, "Skip PII masking");
  curate->add_flag("--no-dedup", copt.no_dedup, "Skip near-duplicate removal");
  curate->add_option("--minhash-k", copt.minhash_k)->capture_default_str();
  curate->add_option("--shingle-n", copt.shingle_n)->capture_default_str();
  curate->add_option("--bands", copt.bands)->capture_default_str();
  curate->add_option("--dedup-threshold", copt.dedup_threshold)
      ->capture_default_str();

  // render
  auto* render = app.add_subcommand("render", "Render a conversation to wire text");
  std::string conversation_path, tools_path, mode_name = "non_reasoning";
  bool generation_prompt = false;
  render->add_option("--conversation", conversation_path, "Conversation JSON file")
      ->required();
  render->add_option("--tools", tools_path, "Tool declarations JSON file");
  render->add_option("--mode", mode_name, "reasoning | non_reasoning")
      ->capture_default_str();
  render->add_flag("--generation-prompt", generation_prompt,
                   "Append the assistant generation prompt");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Summarize a vocabulary file");
  std::string inspect_vocab;
  inspect->add_option("--vocab", inspect_vocab, "Vocabulary file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 1;
  }

  try {
    if (*train) return run_train(train_corpus, target_size, train_out);
    if (*encode) return run_encode(encode_vocab, stochastic_p, seed);
    if (*decode) return run_decode(decode_vocab);
    if (*adapt) {
      return run_adapt(base_path, donor_path, target_script, budget,
                       guard_threshold, batch_size, target_args, guard_args,
                       reference_path, adapt_out, plan_out);
    }
    if (*bench) return run_bench(bench_vocabs, bench_domains, bench_json);
    if (*curate) {
      copt.seed = seed;
      return run_curate(copt);
    }
    if (*render) {
      return run_render(conversation_path, tools_path, mode_name, generation_prompt);
    }
    if (*inspect) return run_inspect(inspect_vocab);
  } catch (const tokkit::InternalError& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
