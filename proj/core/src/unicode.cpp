#include "tokkit/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "tokkit/errors.hpp"

namespace tokkit::unicode {

DecodedChar decode_char(std::string_view text, size_t& offset) {
  const auto start = static_cast<uint32_t>(offset);
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  const size_t n = text.size();
  const unsigned char b0 = bytes[offset];

  auto bad = [&]() -> DecodedChar {
    offset = start + 1;
    return {kReplacement, start, 1, false};
  };

  if (b0 < 0x80) {
    offset = start + 1;
    return {b0, start, 1, true};
  }
  if (b0 < 0xC2) return bad();  // continuation byte or overlong lead
  if (b0 < 0xE0) {
    if (start + 1 >= n || (bytes[start + 1] & 0xC0) != 0x80) return bad();
    char32_t cp = ((b0 & 0x1Fu) << 6) | (bytes[start + 1] & 0x3Fu);
    offset = start + 2;
    return {cp, start, 2, true};
  }
  if (b0 < 0xF0) {
    if (start + 2 >= n || (bytes[start + 1] & 0xC0) != 0x80 ||
        (bytes[start + 2] & 0xC0) != 0x80)
      return bad();
    char32_t cp = ((b0 & 0x0Fu) << 12) | ((bytes[start + 1] & 0x3Fu) << 6) |
                  (bytes[start + 2] & 0x3Fu);
    if (cp < 0x800) return bad();                    // overlong
    if (cp >= 0xD800 && cp <= 0xDFFF) return bad();  // surrogate
    offset = start + 3;
    return {cp, start, 3, true};
  }
  if (b0 < 0xF5) {
    if (start + 3 >= n || (bytes[start + 1] & 0xC0) != 0x80 ||
        (bytes[start + 2] & 0xC0) != 0x80 || (bytes[start + 3] & 0xC0) != 0x80)
      return bad();
    char32_t cp = ((b0 & 0x07u) << 18) | ((bytes[start + 1] & 0x3Fu) << 12) |
                  ((bytes[start + 2] & 0x3Fu) << 6) | (bytes[start + 3] & 0x3Fu);
    if (cp < 0x10000 || cp > 0x10FFFF) return bad();
    offset = start + 4;
    return {cp, start, 4, true};
  }
  return bad();
}

std::vector<DecodedChar> decode(std::string_view text) {
  std::vector<DecodedChar> out;
  out.reserve(text.size());
  size_t offset = 0;
  while (offset < text.size()) out.push_back(decode_char(text, offset));
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string to_utf8(char32_t cp) {
  std::string out;
  append_utf8(out, cp);
  return out;
}

std::string to_utf8(const std::u32string& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::u32string to_utf32(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (const auto& dc : decode(text)) out.push_back(dc.cp);
  return out;
}

size_t count_chars(std::string_view text) {
  size_t count = 0;
  size_t offset = 0;
  while (offset < text.size()) {
    decode_char(text, offset);
    ++count;
  }
  return count;
}

bool is_valid_utf8(std::string_view text) {
  size_t offset = 0;
  while (offset < text.size()) {
    if (!decode_char(text, offset).valid) return false;
  }
  return true;
}

std::string sanitize_utf8(std::string_view text, bool& lossy) {
  lossy = false;
  std::string out;
  out.reserve(text.size());
  size_t offset = 0;
  while (offset < text.size()) {
    const DecodedChar dc = decode_char(text, offset);
    if (!dc.valid) lossy = true;
    if (dc.valid) {
      out.append(text.substr(dc.byte_offset, dc.byte_len));
    } else {
      append_utf8(out, kReplacement);
    }
  }
  return out;
}

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw InternalError("ICU NFC instance unavailable");

  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = norm->normalize(input, status);
  if (U_FAILURE(status)) throw InternalError("ICU NFC normalization failed");

  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_whitespace(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

bool is_decimal_digit(char32_t cp) {
  return u_charType(static_cast<UChar32>(cp)) == U_DECIMAL_DIGIT_NUMBER;
}

bool is_combining_mark(char32_t cp) {
  const int8_t t = u_charType(static_cast<UChar32>(cp));
  return t == U_NON_SPACING_MARK || t == U_ENCLOSING_MARK ||
         t == U_COMBINING_SPACING_MARK;
}

bool is_letter(char32_t cp) {
  const int8_t t = u_charType(static_cast<UChar32>(cp));
  return t == U_UPPERCASE_LETTER || t == U_LOWERCASE_LETTER ||
         t == U_TITLECASE_LETTER || t == U_MODIFIER_LETTER ||
         t == U_OTHER_LETTER;
}

bool is_punctuation(char32_t cp) {
  const int8_t t = u_charType(static_cast<UChar32>(cp));
  return t == U_DASH_PUNCTUATION || t == U_START_PUNCTUATION ||
         t == U_END_PUNCTUATION || t == U_CONNECTOR_PUNCTUATION ||
         t == U_OTHER_PUNCTUATION || t == U_INITIAL_PUNCTUATION ||
         t == U_FINAL_PUNCTUATION;
}

}  // namespace tokkit::unicode
