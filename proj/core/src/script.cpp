#include "tokkit/script.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <array>

#include "tokkit/errors.hpp"
#include "tokkit/unicode.hpp"

namespace tokkit::script {

namespace {

constexpr std::array<std::string_view, kScriptClassCount> kClassNames = {
    "Hangul",      "Latin",       "Han",        "Kana",
    "Cyrillic",    "Greek",       "Arabic",     "Digit",
    "Punctuation", "Whitespace",  "OtherLetter", "OtherSymbol",
};

}  // namespace

std::string_view script_class_name(ScriptClass sc) {
  return kClassNames[static_cast<size_t>(sc)];
}

ScriptClass script_class_from_name(std::string_view name) {
  for (size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<ScriptClass>(i);
  }
  throw ConfigError("unknown script class: " + std::string(name));
}

ScriptClass classify_char(char32_t cp) {
  if (unicode::is_whitespace(cp)) return ScriptClass::Whitespace;
  if (unicode::is_decimal_digit(cp)) return ScriptClass::Digit;

  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode sc = uscript_getScript(static_cast<UChar32>(cp), &status);
  if (U_SUCCESS(status)) {
    switch (sc) {
      case USCRIPT_HANGUL:
        return ScriptClass::Hangul;
      case USCRIPT_LATIN:
        return ScriptClass::Latin;
      case USCRIPT_HAN:
        return ScriptClass::Han;
      case USCRIPT_HIRAGANA:
      case USCRIPT_KATAKANA:
      case USCRIPT_KATAKANA_OR_HIRAGANA:
        return ScriptClass::Kana;
      case USCRIPT_CYRILLIC:
        return ScriptClass::Cyrillic;
      case USCRIPT_GREEK:
        return ScriptClass::Greek;
      case USCRIPT_ARABIC:
        return ScriptClass::Arabic;
      default:
        break;
    }
  }
  if (unicode::is_punctuation(cp)) return ScriptClass::Punctuation;
  if (unicode::is_letter(cp)) return ScriptClass::OtherLetter;
  return ScriptClass::OtherSymbol;
}

bool is_letter_class(ScriptClass sc) {
  switch (sc) {
    case ScriptClass::Digit:
    case ScriptClass::Punctuation:
    case ScriptClass::Whitespace:
    case ScriptClass::OtherSymbol:
      return false;
    default:
      return true;
  }
}

std::vector<Segment> segment(std::string_view text) {
  std::vector<Segment> out;
  if (text.empty()) return out;

  size_t offset = 0;
  bool open = false;
  ScriptClass cur_class = ScriptClass::OtherSymbol;
  uint32_t cur_start = 0;
  size_t cur_end = 0;

  auto flush = [&]() {
    if (!open) return;
    out.push_back(Segment{std::string(text.substr(cur_start, cur_end - cur_start)),
                          cur_class, cur_start});
    open = false;
  };

  while (offset < text.size()) {
    const auto dc = unicode::decode_char(text, offset);
    ScriptClass cls = dc.valid ? classify_char(dc.cp) : ScriptClass::OtherSymbol;

    // Combining marks stay with the letter they attach to; digit segments must
    // stay single-character, so marks never extend those.
    if (dc.valid && unicode::is_combining_mark(dc.cp) && open &&
        is_letter_class(cur_class)) {
      cur_end = dc.byte_offset + dc.byte_len;
      continue;
    }

    const bool breaks = !open || cls != cur_class || cls == ScriptClass::Digit;
    if (breaks) {
      flush();
      open = true;
      cur_class = cls;
      cur_start = dc.byte_offset;
    }
    cur_end = dc.byte_offset + dc.byte_len;
  }
  flush();
  return out;
}

std::vector<std::string> pretokenize(std::string_view text) {
  std::vector<std::string> out;
  const std::vector<Segment> segs = segment(text);

  for (size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    if (seg.script != ScriptClass::Whitespace) {
      out.push_back(seg.text);
      continue;
    }

    // Whitespace becomes standalone single-character pretokens, except a
    // trailing plain space which glues onto a following letter segment.
    std::vector<std::pair<size_t, size_t>> chars;  // (offset, len) within seg.text
    size_t off = 0;
    while (off < seg.text.size()) {
      const size_t start = off;
      unicode::decode_char(seg.text, off);
      chars.emplace_back(start, off - start);
    }

    const bool next_is_letter =
        i + 1 < segs.size() && is_letter_class(segs[i + 1].script);
    const bool glue = next_is_letter && !chars.empty() &&
                      seg.text[chars.back().first] == ' ' &&
                      chars.back().second == 1;

    const size_t standalone = glue ? chars.size() - 1 : chars.size();
    for (size_t c = 0; c < standalone; ++c) {
      out.push_back(seg.text.substr(chars[c].first, chars[c].second));
    }
    if (glue) {
      out.push_back(" " + segs[i + 1].text);
      ++i;
    }
  }
  return out;
}

}  // namespace tokkit::script
