#include "tokkit/vocab_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "tokkit/errors.hpp"

namespace tokkit::vocab_io {

namespace {

constexpr int kFormatVersion = 1;
constexpr std::string_view kB64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

// nlohmann's default object storage is std::map, so dump() emits sorted keys.
using json = nlohmann::json;

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back(kB64Alphabet[v & 63]);
    i += 3;
  }
  const size_t rem = bytes.size() - i;
  if (rem == 1) {
    const uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (rem == 2) {
    const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw ConfigError("base64 length not a multiple of 4");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        vals[k] = 0;
        ++pad;
      } else {
        vals[k] = value_of(c);
        if (vals[k] < 0 || pad > 0) throw ConfigError("invalid base64 input");
      }
    }
    const uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<char>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<char>(v & 0xFF));
  }
  return out;
}

std::string to_json(const bpe::Vocab& vocab) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["base"] = 256;

  json merges = json::array();
  for (const auto& [rank, rule] : vocab.merges()) {
    merges.push_back(json::array({rank, rule.left, rule.right, rule.result}));
  }
  doc["merges"] = std::move(merges);

  json tokens = json::object();
  for (const auto& [rank, rule] : vocab.merges()) {
    tokens[std::to_string(rule.result)] =
        base64_encode(vocab.token_bytes(rule.result));
  }
  doc["tokens"] = std::move(tokens);

  return doc.dump();
}

bpe::Vocab from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("vocab file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("version", -1) != kFormatVersion ||
      doc.value("base", -1) != 256) {
    throw ConfigError("vocab file has an unsupported header");
  }
  if (!doc.contains("merges") || !doc["merges"].is_array() ||
      !doc.contains("tokens") || !doc["tokens"].is_object()) {
    throw ConfigError("vocab file is missing merges or tokens");
  }

  std::vector<bpe::MergeRule> rows;
  rows.reserve(doc["merges"].size());
  for (const auto& row : doc["merges"]) {
    if (!row.is_array() || row.size() != 4) {
      throw ConfigError("vocab merge row must be [rank,left,right,result]");
    }
    rows.push_back(bpe::MergeRule{row[1].get<uint32_t>(), row[2].get<uint32_t>(),
                                  row[3].get<uint32_t>(), row[0].get<uint32_t>()});
  }

  bpe::Vocab vocab = bpe::Vocab::byte_base();
  try {
    vocab = bpe::Vocab::restore(std::move(rows));
  } catch (const Error& e) {
    throw ConfigError(std::string("vocab file is inconsistent: ") + e.what());
  }

  for (const auto& [key, value] : doc["tokens"].items()) {
    uint32_t id = 0;
    try {
      id = static_cast<uint32_t>(std::stoul(key));
    } catch (const std::exception&) {
      throw ConfigError("vocab token key is not an id: " + key);
    }
    const std::string bytes = base64_decode(value.get<std::string>());
    if (!vocab.is_active(id) || vocab.token_bytes(id) != bytes) {
      throw ConfigError("vocab token bytes do not match the merge table for id " +
                        key);
    }
  }

  vocab.validate();
  return vocab;
}

void save(const bpe::Vocab& vocab, const std::filesystem::path& path) {
  const std::string payload = to_json(vocab);
  const std::filesystem::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << payload;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into place: " + path.string());
  }
}

bpe::Vocab load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace tokkit::vocab_io
