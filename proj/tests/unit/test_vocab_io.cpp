#include "tokkit/vocab_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "tokkit/adapt.hpp"
#include "tokkit/errors.hpp"

using namespace tokkit;

TEST(Base64, KnownVectors) {
  EXPECT_EQ(vocab_io::base64_encode(""), "");
  EXPECT_EQ(vocab_io::base64_encode("f"), "Zg==");
  EXPECT_EQ(vocab_io::base64_encode("fo"), "Zm8=");
  EXPECT_EQ(vocab_io::base64_encode("foo"), "Zm9v");
  EXPECT_EQ(vocab_io::base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(vocab_io::base64_decode("Zm9vYmFy"), "foobar");
}

TEST(Base64, RoundTripsArbitraryBytes) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::string bytes;
    const size_t n = rng() % 40;
    for (size_t k = 0; k < n; ++k) bytes.push_back(static_cast<char>(rng() & 0xFF));
    ASSERT_EQ(vocab_io::base64_decode(vocab_io::base64_encode(bytes)), bytes);
  }
}

TEST(Base64, RejectsBadInput) {
  EXPECT_THROW(vocab_io::base64_decode("abc"), ConfigError);
  EXPECT_THROW(vocab_io::base64_decode("ab!="), ConfigError);
}

TEST(VocabIo, RoundTripPreservesEverything) {
  std::mt19937_64 rng(5);
  const bpe::Vocab original = tokkit::testing::random_vocab(rng, 50);
  const bpe::Vocab loaded = vocab_io::from_json(vocab_io::to_json(original));
  loaded.validate();
  EXPECT_TRUE(loaded == original);
}

TEST(VocabIo, SerializationIsCanonical) {
  std::mt19937_64 rng(5);
  const bpe::Vocab v = tokkit::testing::random_vocab(rng, 30);
  const std::string a = vocab_io::to_json(v);
  const std::string b = vocab_io::to_json(vocab_io::from_json(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find(' '), std::string::npos);  // no insignificant whitespace
}

TEST(VocabIo, PrunedVocabKeepsRankGapsAndIds) {
  std::mt19937_64 rng(9);
  const bpe::Vocab original = tokkit::testing::random_vocab(rng, 40);
  // Remove a merge in the middle (plus closure) and round-trip the result.
  const uint32_t victim = std::next(original.merges().begin(), 10)->first;
  const auto [pruned, vacated] = adapt::prune(original, {victim});
  ASSERT_FALSE(vacated.empty());
  const bpe::Vocab loaded = vocab_io::from_json(vocab_io::to_json(pruned));
  loaded.validate();
  EXPECT_TRUE(loaded == pruned);
  EXPECT_EQ(loaded.merges().count(victim), 0u);
}

TEST(VocabIo, RejectsCorruptInput) {
  EXPECT_THROW(vocab_io::from_json("not json"), ConfigError);
  EXPECT_THROW(vocab_io::from_json("{}"), ConfigError);
  EXPECT_THROW(vocab_io::from_json(
                   R"({"version":1,"base":256,"merges":[[0,999,97,256]],"tokens":{}})"),
               ConfigError);
  // Token bytes that contradict the merge table.
  EXPECT_THROW(vocab_io::from_json(
                   R"({"version":1,"base":256,"merges":[[0,97,98,256]],"tokens":{"256":"eHk="}})"),
               ConfigError);
}

TEST(VocabIo, SaveAndLoadFile) {
  namespace fs = std::filesystem;
  std::mt19937_64 rng(13);
  const bpe::Vocab v = tokkit::testing::random_vocab(rng, 20);
  const fs::path dir = fs::temp_directory_path() / "tokkit_vocab_io_test";
  fs::create_directories(dir);
  const fs::path path = dir / "vocab.json";
  vocab_io::save(v, path);
  EXPECT_TRUE(vocab_io::load(path) == v);
  EXPECT_FALSE(fs::exists(dir / "vocab.json.tmp"));
  fs::remove_all(dir);
}
