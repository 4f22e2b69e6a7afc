#include <benchmark/benchmark.h>

#include <random>

#include "scpatcher/embed.hpp"
#include "scpatcher/index.hpp"
#include "scpatcher/ingest.hpp"
#include "scpatcher/kb.hpp"
#include "scpatcher/rerank.hpp"

using namespace scpatcher;

namespace {

embed::VectorIndex random_index(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<embed::IndexEntry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i].function_id = std::to_string(rng());
    entries[i].vector.values.resize(dim);
    for (auto& v : entries[i].vector.values) v = g(rng);
  }
  return embed::VectorIndex(std::move(entries));
}

const kg::KnowledgeBase& corpus() {
  static const kg::KnowledgeBase kb = [] {
    const embed::HashingEmbedder h;
    return kg::build_knowledge_base(SCPATCHER_CORPUS_DIR, h);
  }();
  return kb;
}

}  // namespace

static void BM_Knn(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto index = random_index(static_cast<std::size_t>(state.range(0)), 256, rng);
  const auto q = index.entries().front().vector;
  for (auto _ : state) benchmark::DoNotOptimize(index.knn(q, 50));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Knn)->Arg(500)->Arg(5000)->Arg(50000);

static void BM_Rerank(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> sem(0.0, 2.0);
  std::vector<embed::Candidate> pool(50);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].function_id = std::to_string(i);
    pool[i].s_sem = sem(rng);
    pool[i].guf = 1 + rng() % 100;
    if (i % 3 == 0) pool[i].clone_id = std::to_string(rng() % 8);
    pool[i].signature.features = {"public", "nonpayable"};
  }
  const rerank::QueryContext q{{}, SignatureFeatures{{"public"}}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(rerank::rerank(pool, q, {}));
}
BENCHMARK(BM_Rerank);

static void BM_HashEmbed(benchmark::State& state) {
  const embed::HashingEmbedder h;
  const auto& kb = corpus();
  std::vector<std::string> texts;
  for (const auto& id : kb.graph.function_ids()) texts.push_back(kb.graph.function(id)->source_text);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(h.embed(texts[i++ % texts.size()]));
}
BENCHMARK(BM_HashEmbed);

static void BM_ParseAndBuildKb(benchmark::State& state) {
  const embed::HashingEmbedder h;
  for (auto _ : state) benchmark::DoNotOptimize(kg::build_knowledge_base(SCPATCHER_CORPUS_DIR, h));
}
BENCHMARK(BM_ParseAndBuildKb)->Unit(benchmark::kMillisecond);

static void BM_KbSerialize(benchmark::State& state) {
  const auto& kb = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(kg::deserialize_kb(kg::serialize_kb(kb)));
}
BENCHMARK(BM_KbSerialize);
BENCHMARK_MAIN();
