#pragma once

// Deterministic fixture corpora. Everything derives from fixed seeds and the
// standard-pinned mt19937_64 stream, so fixture-calibrated regression values
// stay stable across runs and machines.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tokkit/bpe.hpp"

namespace tokkit::testing {

std::vector<std::string> english_general_docs(size_t n_docs, uint64_t seed);
std::vector<std::string> english_code_docs(size_t n_docs, uint64_t seed);
std::vector<std::string> english_stem_docs(size_t n_docs, uint64_t seed);
std::vector<std::string> korean_general_docs(size_t n_docs, uint64_t seed);
std::vector<std::string> korean_stem_docs(size_t n_docs, uint64_t seed);

/// Cyrillic/Greek/Arabic filler the way a broad web crawl would contribute
/// languages the deployment never benchmarks.
std::vector<std::string> multilingual_docs(size_t n_docs, uint64_t seed);

struct BilingualFixture {
  // English-heavy 8K vocabulary with a thin Korean slice, and the
  // Korean-trained 2K donor.
  bpe::Vocab base = bpe::Vocab::byte_base();
  bpe::Vocab donor = bpe::Vocab::byte_base();
  std::map<std::string, std::vector<std::string>> target_corpora;  // ko-*
  std::map<std::string, std::vector<std::string>> guard_corpora;   // en-*
  std::vector<std::string> reference_corpus;  // mixed, for utility counting
};

/// The bundled adaptation fixture; built once per process (training the 8K
/// base takes a couple of seconds).
const BilingualFixture& bilingual_fixture();

/// Small corpora for CLI-level tests: name → documents.
std::map<std::string, std::vector<std::string>> small_domain_corpora();

}  // namespace tokkit::testing
