#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ideaforge/burst.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/rng.hpp"
#include "ideaforge/textprep.hpp"

namespace {

using namespace ideaforge;

textprep::DocTermMatrix random_dtm(std::size_t docs, std::size_t terms, int doc_len) {
  Rng rng(1);
  std::vector<std::vector<textprep::TermCount>> rows(docs);
  for (auto& row : rows) {
    std::vector<std::uint32_t> counts(terms, 0);
    for (int i = 0; i < doc_len; ++i) ++counts[rng.below(terms)];
    for (std::size_t w = 0; w < terms; ++w) {
      if (counts[w]) row.push_back({static_cast<std::uint32_t>(w), counts[w]});
    }
  }
  return textprep::DocTermMatrix(terms, std::move(rows));
}

void BM_GibbsSweep(benchmark::State& state) {
  const auto dtm = random_dtm(1000, 2000, 80);
  topicmodel::GibbsSampler s(dtm, static_cast<int>(state.range(0)), 0.1, 0.01, 7);
  for (auto _ : state) s.sweep();
  state.SetItemsProcessed(state.iterations() * dtm.total_tokens());
}
BENCHMARK(BM_GibbsSweep)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_BurstDetection(benchmark::State& state) {
  Rng rng(2);
  burst::BurstStream s;
  s.term = "w";
  for (int t = 0; t < state.range(0); ++t) {
    s.years.push_back(1900 + t);
    s.total.push_back(500 + static_cast<std::int64_t>(rng.below(500)));
    s.relevant.push_back(static_cast<std::int64_t>(rng.below(40)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(burst::detect_bursts(s));
}
BENCHMARK(BM_BurstDetection)->Arg(44)->Arg(1000);

void BM_Tokenize(benchmark::State& state) {
  const std::string text =
      "Autonomous vehicles combine LiDAR point clouds, radar returns and camera images. "
      "Sensor fusion networks were evaluated on urban driving datasets, and the colour "
      "segmentation models generalised across weather conditions in 2019 trials.";
  const textprep::TokenPipelineConfig cfg;
  const auto stop = textprep::effective_stopwords(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(textprep::prepare_document(text, cfg, stop));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

}  // namespace

BENCHMARK_MAIN();
