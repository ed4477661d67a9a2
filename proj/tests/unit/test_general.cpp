#include <gtest/gtest.h>

#include <cmath>

#include "gossip/applications.hpp"
#include "gossip/general.hpp"
#include "oracles/oracles.hpp"

using namespace gossip;

namespace {

oracle::EdgeList edge_list(const Graph& g) {
  oracle::EdgeList out;
  for (const Edge& x : g.edges()) out.emplace_back(x.u, x.v);
  return out;
}

ArcGraph arcs_of(const Graph& g) { return ArcGraph::from_edges(g.n(), edge_list(g)); }

void check_sparse(const Graph& g, const SparseSubgraph& s) {
  const std::uint32_t n = g.n();
  for (NodeId v = 1; v <= n; ++v) {
    EXPECT_NE(bool(s.low[v]), bool(s.hbar[v])) << v;
    if (s.star[v]) {
      EXPECT_TRUE(s.hbar[v]) << v;
    }
    EXPECT_EQ(s.forest.in_forest(v), bool(s.hbar[v])) << v;
  }
  EXPECT_TRUE(forest_consistent(g, s.forest));
  EXPECT_LE(s.max_kept(), s.sched.kept_bound);
  for (auto [a, b] : s.el_prime) EXPECT_TRUE(g.has_edge(a, b));
  // Kept edges preserve the connectivity of g.
  oracle::EdgeList sub = s.e_hbar_prime();
  for (auto e : s.e_l_prime()) sub.push_back(e);
  EXPECT_TRUE(oracle::same_components(n, edge_list(g), sub, std::vector<char>(n + 1, 1)));
  // Trees span exactly the components of the hbar-induced subgraph.
  EXPECT_TRUE(oracle::same_components(n, e_hbar(g, s), s.e_hbar_prime(), s.hbar));
}

}  // namespace

TEST(General, ScheduleForCompleteSixtyFour) {
  const GeneralSchedule s = general_schedule(64, {});
  // 4 * 8 * ln 64 = 133.08: no clique node reaches the threshold.
  EXPECT_EQ(s.threshold, 134u);
  EXPECT_EQ(s.merge_phases, 18u);
}

TEST(General, MpxJoinsBestShiftedRoot) {
  GraphSpec spec{Family::kErdosRenyi, 40};
  spec.p = 0.1;
  spec.seed = 2;
  const Graph g = generate(spec);
  const ArcGraph h = arcs_of(g);
  const auto adj = oracle::adjacency(40, edge_list(g));
  Engine e(g, Budget{}, kDefaultMaxRounds, 9);
  const auto shifts = mpx_shifts(e, 0.25, 20.0);
  for (NodeId v = 1; v <= 40; ++v) EXPECT_LE(shifts[v], 20.0);
  const MpxClustering c = mpx_decompose(e, h, std::vector<char>(41, 1), 40, 0.25, shifts, 45);
  std::vector<std::vector<std::uint32_t>> dist(41);
  for (NodeId r = 1; r <= 40; ++r) dist[r] = oracle::bfs(adj, r);
  for (NodeId v = 1; v <= 40; ++v) {
    NodeId best = 0;
    double bv = -1e18;
    for (NodeId r = 1; r <= 40; ++r) {
      if (dist[r][v] == UINT32_MAX) continue;
      const double x = shifts[r] - dist[r][v];
      if (x > bv + 1e-12) {
        bv = x;
        best = r;
      }
    }
    EXPECT_EQ(c.root[v], best) << v;
  }
  EXPECT_TRUE(forest_consistent(g, c.forest()));
}

TEST(General, MpxSimulationMatchesDirectCongest) {
  const Graph g = generate({Family::kStar, 30});
  const ArcGraph h = arcs_of(g);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Engine e(g, Budget{}, kDefaultMaxRounds, seed);
    const auto shifts = mpx_shifts(e, 0.25, 20.0);
    const MpxClustering sim = mpx_decompose(e, h, std::vector<char>(31, 1), 29, 0.25, shifts, 21);
    const MpxClustering ref = oracle::mpx_reference(h, shifts, 21, bits_for(g.id_bound()));
    EXPECT_EQ(sim.root, ref.root);
    EXPECT_EQ(sim.parent, ref.parent);
    EXPECT_EQ(sim.depth, ref.depth);
  }
}

TEST(General, CompleteSixtyFourIsAllLowDegree) {
  const Graph g = generate({Family::kComplete, 64});
  const SparsifyResult r = sparsify(g, {}, 1);
  // Sampled stars aside, nobody is high degree.
  for (NodeId v = 1; v <= 64; ++v) EXPECT_TRUE(r.sparse.low[v] || r.sparse.star[v]) << v;
  check_sparse(g, r.sparse);
}

TEST(General, SparsifyStarHasHighDegreeCenter) {
  const Graph g = generate({Family::kStar, 1024});
  const SparsifyResult r = sparsify(g, {}, 3);
  std::uint32_t high = 0;
  for (NodeId v = 1; v <= 1024; ++v) high += r.sparse.hbar[v] ? 1 : 0;
  EXPECT_GE(high, 1u);
  check_sparse(g, r.sparse);
}

TEST(General, SparsifyRandomFamilies) {
  for (Family f : {Family::kRandomRegular, Family::kErdosRenyi, Family::kDumbbell}) {
    GraphSpec spec{f, 128};
    spec.d = 4;
    spec.p = 0.08;
    spec.seed = 5;
    const Graph g = generate(spec);
    for (std::uint64_t seed = 1; seed <= 2; ++seed) check_sparse(g, sparsify(g, {}, seed).sparse);
  }
}

TEST(General, RumorReachesEveryone) {
  for (Family f : {Family::kPath, Family::kDumbbell, Family::kStar, Family::kRandomRegular}) {
    GraphSpec spec{f, 128};
    spec.seed = 11;
    const Graph g = generate(spec);
    const GeneralResult r = rumor_spread_general(g, 5, {}, 2);
    for (NodeId v = 1; v <= g.n(); ++v) ASSERT_EQ(r.rumor[v], 1u) << family_name(f) << " " << v;
    EXPECT_TRUE(r.stats.halted_spanning);
    const Forest t = extract_spanning_tree(g, spread_run(r, 5));
    EXPECT_EQ(t.roots(), std::vector<NodeId>{5});
    EXPECT_LE(r.trace.max_message_bits, Budget{}.max_bits(g.id_bound()));
  }
}

TEST(General, MaxValueWinsFromManySources) {
  const Graph g = generate({Family::kCycle, 40});
  std::vector<std::uint64_t> init(41, 0);
  for (NodeId v = 1; v <= 40; ++v) init[v] = (v * 7) % 41;
  const GeneralResult r = spread_general(g, init, {}, 3);
  std::uint64_t top = 0;
  for (auto x : init) top = std::max(top, x);
  for (NodeId v = 1; v <= 40; ++v) EXPECT_EQ(r.rumor[v], top);
  ASSERT_EQ(r.tree.roots().size(), 1u);
  EXPECT_EQ(init[r.tree.roots()[0]], top);
}

TEST(General, ZeroRumorRejected) {
  const Graph g = generate({Family::kPath, 4});
  GeneralConfig cfg;
  cfg.rumor = 0;
  EXPECT_THROW(rumor_spread_general(g, 1, cfg, 1), Error);
  EXPECT_THROW(rumor_spread_general(g, 0, {}, 1), Error);
}
