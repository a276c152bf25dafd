#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tokkit/bpe.hpp"

namespace tokkit::vocab_io {

/// Canonical JSON serialization of a vocabulary. Keys are sorted and there is
/// no insignificant whitespace, so equal vocabularies serialize to equal bytes.
/// Layout: {"base":256,"merges":[[rank,left,right,result],...],"tokens":{id:b64},"version":1}
/// with merges sorted by rank and tokens covering the active non-base ids.
std::string to_json(const bpe::Vocab& vocab);

/// Parses a vocabulary back. Throws ConfigError on malformed or inconsistent
/// input (wrong version, token bytes that do not match the merge table, ...).
bpe::Vocab from_json(std::string_view json_text);

/// Atomic file save: writes to a temp path in the same directory and renames.
void save(const bpe::Vocab& vocab, const std::filesystem::path& path);
bpe::Vocab load(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws ConfigError

}  // namespace tokkit::vocab_io
