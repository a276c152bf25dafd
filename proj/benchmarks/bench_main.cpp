#include <benchmark/benchmark.h>

#include <numeric>

#include "fixtures.hpp"
#include "tokkit/bpe.hpp"
#include "tokkit/corpus.hpp"
#include "tokkit/script.hpp"

using namespace tokkit;

namespace {

std::string joined_docs(std::vector<std::string> docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d;
    out += '\n';
  }
  return out;
}

const bpe::Vocab& bench_vocab() {
  static const bpe::Vocab vocab = [] {
    auto corpus = testing::english_general_docs(40, 9001);
    for (auto& d : testing::korean_general_docs(10, 9002)) corpus.push_back(d);
    return bpe::train(corpus, 4096).vocab;
  }();
  return vocab;
}

void BM_Pretokenize(benchmark::State& state) {
  const std::string text = joined_docs(testing::english_general_docs(20, 9003));
  for (auto _ : state) {
    benchmark::DoNotOptimize(script::pretokenize(text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_Pretokenize);

void BM_EncodeEnglish(benchmark::State& state) {
  const auto& vocab = bench_vocab();
  const std::string text = joined_docs(testing::english_general_docs(20, 9004));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bpe::encode(vocab, text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_EncodeEnglish);

void BM_EncodeKorean(benchmark::State& state) {
  const auto& vocab = bench_vocab();
  const std::string text = joined_docs(testing::korean_general_docs(20, 9005));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bpe::encode(vocab, text));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_EncodeKorean);

void BM_EncodeStochastic(benchmark::State& state) {
  const auto& vocab = bench_vocab();
  const std::string text = joined_docs(testing::english_general_docs(20, 9006));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bpe::encode_stochastic(vocab, text, {0.1, 42}));
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_EncodeStochastic);

void BM_TrainSmall(benchmark::State& state) {
  const auto corpus = testing::english_general_docs(20, 9007);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bpe::train(corpus, 1024));
  }
}
BENCHMARK(BM_TrainSmall)->Unit(benchmark::kMillisecond);

void BM_MinHash(benchmark::State& state) {
  corpus::DocRecord doc;
  doc.text = joined_docs(testing::english_general_docs(4, 9008));
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus::minhash(doc, 128, 5, 42));
  }
}
BENCHMARK(BM_MinHash)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
