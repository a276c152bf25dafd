#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tokkit::unicode {

/// Replacement character emitted for undecodable byte sequences.
inline constexpr char32_t kReplacement = 0xFFFD;

/// One decoded scalar value plus where its bytes live in the source string.
/// For invalid input, cp is kReplacement and the span covers the bad byte(s).
struct DecodedChar {
  char32_t cp;
  uint32_t byte_offset;
  uint32_t byte_len;
  bool valid;
};

/// Decodes the scalar value starting at `offset`. Advances `offset` past the
/// consumed bytes. Invalid sequences consume one byte and report valid=false.
DecodedChar decode_char(std::string_view text, size_t& offset);

/// Full decode of a UTF-8 string; never fails (invalid bytes map to U+FFFD
/// spans with valid=false).
std::vector<DecodedChar> decode(std::string_view text);

void append_utf8(std::string& out, char32_t cp);
std::string to_utf8(char32_t cp);
std::string to_utf8(const std::u32string& cps);
std::u32string to_utf32(std::string_view text);

/// Number of Unicode scalar values in the string (invalid bytes count one each).
size_t count_chars(std::string_view text);

bool is_valid_utf8(std::string_view text);

/// Lossy re-encoding: invalid sequences become U+FFFD. `lossy` reports whether
/// any replacement happened.
std::string sanitize_utf8(std::string_view text, bool& lossy);

/// Canonical composition (NFC).
std::string nfc(std::string_view text);

// Character properties (Unicode as shipped by the system ICU).
bool is_whitespace(char32_t cp);     // White_Space property
bool is_decimal_digit(char32_t cp);  // general category Nd
bool is_combining_mark(char32_t cp); // general categories Mn, Mc, Me
bool is_letter(char32_t cp);         // general categories Lu, Ll, Lt, Lm, Lo
bool is_punctuation(char32_t cp);    // general categories P*

}  // namespace tokkit::unicode
