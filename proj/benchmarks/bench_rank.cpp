#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "goalspot/engine.hpp"
#include "goalspot/harness.hpp"
#include "goalspot/kb_io.hpp"

using namespace goalspot;

namespace {

const KnowledgeBase& demo() {
    static const KnowledgeBase kb = load_kb_file(std::string(GOALSPOT_DATA_DIR) + "/demo_kb.json");
    return kb;
}

SynthParams large_scale() {
    SynthParams p;
    p.numGoals = 1000;
    p.numTerms = 5000;
    p.numLinks = 145000;
    p.seed = 7;
    return p;
}

const KnowledgeBase& big() {
    static const KnowledgeBase kb = synth_kb(large_scale());
    return kb;
}

std::vector<std::string> sampled(const KnowledgeBase& kb, std::size_t n) {
    Rng rng(3);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_query(kb, rng.below(kb.goals().size()), rng.next()).text);
    return out;
}

void BM_RankDemo(benchmark::State& state) {
    const char* queries[] = {"print", "create a chart", "change this chart", "how do I get rid of blank rows",
                             "insert page break", "sum a column"};
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(rank(demo(), queries[i++ % 6], {}));
}
BENCHMARK(BM_RankDemo);

void BM_RankLargeKb(benchmark::State& state) {
    static const auto queries = sampled(big(), 256);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(rank(big(), queries[i++ % queries.size()], {}));
}
BENCHMARK(BM_RankLargeKb)->Unit(benchmark::kMillisecond);

void BM_RankLargeKbExplain(benchmark::State& state) {
    static const auto queries = sampled(big(), 256);
    RankOptions o;
    o.explain = true;
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(rank(big(), queries[i++ % queries.size()], o));
}
BENCHMARK(BM_RankLargeKbExplain)->Unit(benchmark::kMillisecond);

void BM_LoadLargeKb(benchmark::State& state) {
    static const std::string text = serialize_kb(big().data());
    for (auto _ : state) benchmark::DoNotOptimize(load_kb(text));
}
BENCHMARK(BM_LoadLargeKb)->Unit(benchmark::kMillisecond);

void BM_LoadDemo(benchmark::State& state) {
    static const std::string text = serialize_kb(demo().data());
    for (auto _ : state) benchmark::DoNotOptimize(load_kb(text));
}
BENCHMARK(BM_LoadDemo)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
