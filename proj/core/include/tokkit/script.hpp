#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tokkit::script {

/// Reduced script alphabet used for boundary detection and merge-rule tagging.
/// Every Unicode scalar value maps to exactly one class; whitespace dominates,
/// then decimal digits, then script identity.
enum class ScriptClass : uint8_t {
  Hangul,
  Latin,
  Han,
  Kana,
  Cyrillic,
  Greek,
  Arabic,
  Digit,
  Punctuation,
  Whitespace,
  OtherLetter,
  OtherSymbol,
};

inline constexpr size_t kScriptClassCount = 12;

std::string_view script_class_name(ScriptClass sc);

/// Parses a class name as printed by script_class_name (case-sensitive).
/// Throws ConfigError for unknown names.
ScriptClass script_class_from_name(std::string_view name);

ScriptClass classify_char(char32_t cp);

/// True for the classes whose members are letters of a concrete script
/// (everything except Digit, Punctuation, Whitespace and OtherSymbol).
bool is_letter_class(ScriptClass sc);

/// A contiguous span of text with a uniform script class. Digit segments are
/// always a single character. Combining marks extend the preceding letter
/// segment rather than forming their own.
struct Segment {
  std::string text;
  ScriptClass script;
  uint32_t byte_offset;  // offset into the UTF-8 encoding of the source

  bool operator==(const Segment&) const = default;
};

/// Splits text into maximal same-class runs, except digit runs which come out
/// one character per segment. Concatenating the segment texts reproduces the
/// input byte-for-byte.
std::vector<Segment> segment(std::string_view text);

/// Splits text into the spans BPE merges may not cross: script segments, with
/// whitespace broken into standalone characters except that a single trailing
/// space glues onto a following letter-class segment.
std::vector<std::string> pretokenize(std::string_view text);

}  // namespace tokkit::script
