#include <benchmark/benchmark.h>

#include "gossip/applications.hpp"
#include "gossip/sketch.hpp"

using namespace gossip;

namespace {

Graph make(Family f, std::uint32_t n, bool weighted = false) {
  GraphSpec s{f, n};
  s.d = 3;
  s.seed = 1;
  s.weighted = weighted;
  return generate(s);
}

void BM_SketchMerge(benchmark::State& state) {
  const Graph g = make(Family::kRandomRegular, static_cast<std::uint32_t>(state.range(0)));
  const SketchParams p{7, g.id_bound(), reps_for_failure(0.05)};
  const EdgeKeep all = [](NodeId, NodeId) { return true; };
  std::vector<Sketch> nodes;
  for (NodeId v = 1; v <= g.n(); ++v) nodes.push_back(node_sketch(v, g.neighbors(v), all, p));
  for (auto _ : state) {
    Sketch s(p);
    for (const Sketch& x : nodes) s.merge(x);
    benchmark::DoNotOptimize(s.sample());
  }
  state.SetItemsProcessed(state.iterations() * g.n());
}
BENCHMARK(BM_SketchMerge)->Arg(256)->Arg(1024);

void BM_PushPull(benchmark::State& state) {
  const Graph g = make(Family::kRandomRegular, static_cast<std::uint32_t>(state.range(0)));
  std::uint64_t seed = 0, rounds = 0;
  for (auto _ : state) rounds += uniform_push_pull(g, 1, ++seed).trace.rounds;
  state.counters["rounds"] = benchmark::Counter(double(rounds), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_PushPull)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_WeakCondDumbbell(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const Graph g = make(Family::kDumbbell, n);
  WeakCondConfig cfg;
  cfg.c = 2;
  cfg.phi = clique_conductance(n / 2);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rumor_spread_weakcond(g, 1, cfg, ++seed));
}
BENCHMARK(BM_WeakCondDumbbell)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_General(benchmark::State& state) {
  const Graph g = make(Family::kRandomRegular, static_cast<std::uint32_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rumor_spread_general(g, 1, {}, ++seed));
}
BENCHMARK(BM_General)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Congest(benchmark::State& state) {
  const Graph g = make(Family::kRandomRegular, 1024);
  std::vector<std::pair<NodeId, NodeId>> es;
  for (const Edge& e : g.edges()) es.emplace_back(e.u, e.v);
  const ArcGraph h = ArcGraph::from_edges(g.n(), es);
  const std::vector<char> cover(g.n() + 1, 1);
  std::vector<MaybeMsg> out(h.arcs(), CongestMsg{{1, 2, 3}, 64}), in;
  Engine e(g);
  for (auto _ : state) simulate_congest_round(e, h, cover, 3, out, in);
  state.SetItemsProcessed(state.iterations() * h.arcs());
}
BENCHMARK(BM_Congest);

void BM_Mst(benchmark::State& state) {
  const Graph g = make(Family::kRandomRegular, static_cast<std::uint32_t>(state.range(0)), true);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mst(g, MstConfig{}, GeneralConfig{}, ++seed));
}
BENCHMARK(BM_Mst)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
