// Serial reference vs OpenMP kernels on a planted-community graph.
#include <benchmark/benchmark.h>

#include <vector>

#include "trine/centrality.hpp"
#include "trine/synth.hpp"
#include "trine/walks.hpp"

namespace {

const trine::TripartiteGraph& graph() {
  static const auto g = trine::planted_graph({3000, 600, 300, 3, 0.05, 0.005, 7});
  return g;
}

trine::Exec exec_of(const benchmark::State& state) {
  return state.range(0) ? trine::Exec::Parallel : trine::Exec::Serial;
}

void BM_AdjacencyMultiply(benchmark::State& state) {
  const auto& g = graph();
  std::vector<double> x(g.node_count(), 1.0), y(g.node_count());
  for (auto _ : state) {
    trine::adjacency_multiply(g, x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_Hits(benchmark::State& state) {
  const auto& g = graph();
  for (auto _ : state) benchmark::DoNotOptimize(trine::hits(g, {}, exec_of(state)));
}

void BM_GenerateCorpus(benchmark::State& state) {
  const auto& g = graph();
  const auto scores = trine::hits(g);
  const std::vector<trine::Metapath> paths{trine::parse_metapath("upcpu"), trine::parse_metapath("cpupc")};
  trine::WalkConfig cfg;
  cfg.max_walks = 8;
  for (auto _ : state) benchmark::DoNotOptimize(trine::generate_corpus(g, paths, scores, cfg, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_AdjacencyMultiply)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_Hits)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateCorpus)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
