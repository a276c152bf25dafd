#include "tokkit/bench.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tokkit/errors.hpp"
#include "tokkit/unicode.hpp"

using namespace tokkit;
using bpe::Vocab;

namespace {

// Independent two-pass rate: count characters and tokens separately.
double two_pass_rate(const Vocab& v, const std::vector<std::string>& docs) {
  uint64_t chars = 0;
  for (const auto& d : docs) chars += unicode::to_utf32(d).size();
  uint64_t tokens = 0;
  for (const auto& d : docs) tokens += tokkit::testing::oracle_encode(v, d).size();
  return static_cast<double>(chars) / static_cast<double>(tokens);
}

}  // namespace

TEST(CompressionRate, ByteFallbackGivesExactlyOne) {
  const Vocab v = Vocab::byte_base();
  const auto domain = bench::make_domain("en-general", {"plain ascii text"});
  EXPECT_DOUBLE_EQ(bench::compression_rate(v, domain), 1.0);
}

TEST(CompressionRate, PooledArithmetic) {
  // 170 two-char tokens plus 30 three-char tokens: 430 chars over 200 tokens.
  Vocab v = Vocab::byte_base();
  v.add_merge('a', 'b');
  const auto cd = v.add_merge('c', 'd');
  v.add_merge(cd, 'e');
  std::string doc;
  for (int i = 0; i < 170; ++i) doc += "ab";
  for (int i = 0; i < 30; ++i) doc += "cde";
  const auto domain = bench::make_domain("en-general", {doc});
  EXPECT_DOUBLE_EQ(bench::compression_rate(v, domain), 2.15);
}

TEST(CompressionRate, MatchesTwoPassOracle) {
  std::mt19937_64 rng(71);
  const Vocab v = tokkit::testing::random_vocab(rng, 40);
  std::vector<std::string> docs;
  for (int i = 0; i < 30; ++i) docs.push_back(tokkit::testing::random_mixed_string(rng, 80));
  const auto domain = bench::make_domain("xx-general", docs);
  EXPECT_DOUBLE_EQ(bench::compression_rate(v, domain), two_pass_rate(v, docs));
}

TEST(CompressionRate, ScaleInvariance) {
  std::mt19937_64 rng(73);
  const Vocab v = tokkit::testing::random_vocab(rng, 40);
  std::vector<std::string> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(tokkit::testing::random_mixed_string(rng, 60));
  std::vector<std::string> doubled = docs;
  doubled.insert(doubled.end(), docs.begin(), docs.end());
  EXPECT_DOUBLE_EQ(bench::compression_rate(v, bench::make_domain("a-general", docs)),
                   bench::compression_rate(v, bench::make_domain("a-general", doubled)));
}

TEST(CompressionRate, PooledNotPerDocumentMean) {
  Vocab v = Vocab::byte_base();
  v.add_merge('a', 'a');
  // Long doc compresses 2:1, short doc not at all; pooled rate must weight by
  // size, not average 2.0 and 1.0.
  const std::string long_doc(1000, 'a');
  const std::string short_doc = "xy";
  const auto domain = bench::make_domain("en-general", {long_doc, short_doc});
  const double rate = bench::compression_rate(v, domain);
  EXPECT_DOUBLE_EQ(rate, 1002.0 / 502.0);
  EXPECT_NE(rate, (2.0 + 1.0) / 2.0);
}

TEST(CompressionRate, EmptyDomainThrows) {
  const Vocab v = Vocab::byte_base();
  EXPECT_THROW(bench::compression_rate(v, bench::make_domain("en-general", {})),
               DomainEmptyError);
}

TEST(Report, SingleCell) {
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  const auto rep =
      bench::report(tokenizers, {bench::make_domain("en-general", {"abc"})});
  EXPECT_EQ(rep.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.rows.at("base").at("en-general"), 1.0);
}

TEST(Report, TableOneColumnOrder) {
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  Vocab merged = Vocab::byte_base();
  merged.add_merge('a', 'b');
  tokenizers.emplace("adapted", merged);

  // Deliberately scrambled input order.
  std::vector<bench::DomainCorpus> domains = {
      bench::make_domain("ko-stem", {"정리 123"}),
      bench::make_domain("en-code", {"x = f(1)"}),
      bench::make_domain("ko-general", {"안녕하세요"}),
      bench::make_domain("en-stem", {"E = mc2"}),
      bench::make_domain("en-general", {"hello ab world"}),
  };
  const auto rep = bench::report(tokenizers, domains);
  EXPECT_EQ(rep.domain_order,
            (std::vector<std::string>{"en-general", "en-code", "en-stem",
                                      "ko-general", "ko-stem"}));
  size_t cells = 0;
  for (const auto& [name, row] : rep.rows) cells += row.size();
  EXPECT_EQ(cells, 10u);
}

TEST(Report, ErrorsCarryTokenizerAndDomainContext) {
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  try {
    bench::report(tokenizers, {bench::make_domain("ko-general", {})});
    FAIL() << "expected an error for the empty domain";
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("base"), std::string::npos);
    EXPECT_NE(what.find("ko-general"), std::string::npos);
  }
}

TEST(Report, EmptyInputsThrow) {
  EXPECT_THROW(bench::report({}, {bench::make_domain("en-general", {"x"})}),
               InvalidArgumentError);
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  EXPECT_THROW(bench::report(tokenizers, {}), InvalidArgumentError);
}

TEST(FormatRate, FourDecimals) {
  EXPECT_EQ(bench::format_rate(2.15), "2.1500");
  EXPECT_EQ(bench::format_rate(1.0), "1.0000");
  EXPECT_EQ(bench::format_rate(1.0 / 3.0), "0.3333");
  EXPECT_EQ(bench::format_rate(0.66666), "0.6667");
  EXPECT_EQ(bench::format_rate(4.55), "4.5500");
  EXPECT_EQ(bench::format_rate(12.34567), "12.3457");
}

TEST(RenderTable, FrozenLayout) {
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  const auto rep = bench::report(
      tokenizers, {bench::make_domain("en-general", {"abcd"}),
                   bench::make_domain("ko-general", {"안녕"})});
  const std::string expected =
      "Tokenizer  en-general  ko-general\n"
      "base           1.0000      0.3333\n";
  EXPECT_EQ(bench::render_table(rep), expected);
}

TEST(ReportJson, FourDecimalRates) {
  std::map<std::string, Vocab> tokenizers;
  tokenizers.emplace("base", Vocab::byte_base());
  const auto rep = bench::report(
      tokenizers, {bench::make_domain("en-general", {"abcd"}),
                   bench::make_domain("ko-general", {"안녕"})});
  EXPECT_EQ(bench::to_json(rep),
            R"({"base":{"en-general":1.0000,"ko-general":0.3333}})");
}
