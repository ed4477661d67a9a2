#include <gtest/gtest.h>

#include <optional>

#include "gossip/primitives.hpp"
#include "gossip/sketch.hpp"

using namespace gossip;

namespace {

// Path 1-2-...-n rooted at 1.
Forest path_tree(std::uint32_t n) {
  Forest f(n);
  f.make_root(1);
  for (NodeId v = 2; v <= n; ++v) {
    f.parent[v] = v - 1;
    f.depth[v] = v - 1;
    f.root[v] = 1;
  }
  return f;
}

// Stars on the two cliques of dumbbell(8), centered at 1 and 5.
Forest clique_stars() {
  Forest f(8);
  for (NodeId c : {1u, 5u}) {
    f.make_root(c);
    for (NodeId v = c + 1; v < c + 4; ++v) {
      f.parent[v] = c;
      f.depth[v] = 1;
      f.root[v] = c;
    }
  }
  return f;
}

}  // namespace

TEST(Primitives, TRounds) {
  EXPECT_EQ(t_rounds(1, 1.0), 6u);  // n is clamped to 2: ceil(8 ln 2)
  EXPECT_EQ(t_rounds(64, 0.5, 8.0), 67u);  // ceil(8 ln 64 / 0.5) = ceil(66.54)
}

TEST(Primitives, SpreadMaxRumorOnClique) {
  const Graph g = generate({Family::kComplete, 32});
  Engine e(g, Budget{}, kDefaultMaxRounds, 3);
  std::vector<std::uint64_t> r(33, 0);
  r[4] = 9;
  r[20] = 17;
  const auto out = spread_max_rumor(e, r, 60);
  EXPECT_EQ(e.round(), 60u);
  for (NodeId v = 1; v <= 32; ++v) EXPECT_EQ(out[v], 17u) << v;
}

TEST(Primitives, BuildForestTwoSources) {
  const Graph g = generate({Family::kComplete, 16});
  Engine e(g, Budget{}, kDefaultMaxRounds, 5);
  std::vector<char> src(17, 0);
  src[3] = src[11] = 1;
  const Forest f = build_forest(e, src, 40);
  EXPECT_TRUE(forest_acyclic(f));
  EXPECT_EQ(f.roots(), std::vector<NodeId>{11});
  for (NodeId v = 1; v <= 16; ++v) {
    EXPECT_EQ(f.root[v], 11u);
    if (f.parent[v]) {
      EXPECT_TRUE(g.has_edge(v, f.parent[v]));
    }
  }
}

TEST(Primitives, BuildForestUnreachedStaysOut) {
  const Graph g = generate({Family::kPath, 10});
  Engine e(g);
  std::vector<char> src(11, 0);
  src[1] = 1;
  const Forest f = build_forest(e, src, 2);
  for (NodeId v = 4; v <= 10; ++v) EXPECT_FALSE(f.in_forest(v));
  EXPECT_TRUE(forest_acyclic(f));
  EXPECT_TRUE(f.in_forest(3));
}

TEST(Primitives, BroadcastTakesExactlyLimit) {
  const Graph g = generate({Family::kPath, 4});
  const Forest f = path_tree(4);
  ASSERT_TRUE(forest_consistent(g, f));
  Engine e(g);
  std::vector<std::optional<std::uint64_t>> val(5);
  val[1] = 42;
  broadcast(e, f, val, 5, [](std::uint64_t) { return 8; });
  EXPECT_EQ(e.round(), 5u);
  for (NodeId v = 1; v <= 4; ++v) EXPECT_EQ(val[v], 42u);
}

TEST(Primitives, BroadcastMapAddsHops) {
  const Graph g = generate({Family::kPath, 4});
  const Forest f = path_tree(4);
  Engine e(g);
  std::vector<std::optional<std::uint64_t>> val(5);
  val[1] = 0;
  broadcast_map(e, f, val, 3, [](std::uint64_t) { return 8; },
                [](NodeId, std::uint64_t x) { return x + 1; });
  for (NodeId v = 1; v <= 4; ++v) EXPECT_EQ(val[v], std::uint64_t{v - 1});
}

TEST(Primitives, ConvergecastSum) {
  const Graph g = generate({Family::kPath, 4});
  const Forest f = path_tree(4);
  Engine e(g);
  std::vector<std::uint64_t> acc{0, 1, 2, 3, 4};
  convergecast(e, f, acc, 3, [](std::uint64_t& a, std::uint64_t b) { a += b; },
               [](std::uint64_t) { return 8; });
  EXPECT_EQ(e.round(), 3u);
  EXPECT_EQ(acc[1], 10u);
  EXPECT_EQ(acc[3], 7u);
}

TEST(Primitives, ConvergecastTooShortLimitMissesDeepNodes) {
  const Graph g = generate({Family::kPath, 4});
  const Forest f = path_tree(4);
  Engine e(g);
  std::vector<std::uint64_t> acc{0, 1, 1, 1, 1};
  convergecast(e, f, acc, 2, [](std::uint64_t& a, std::uint64_t b) { a += b; },
               [](std::uint64_t) { return 8; });
  EXPECT_EQ(acc[1], 3u);
}

TEST(Primitives, PullBroadcastRepairsDepths) {
  const Graph g = generate({Family::kPath, 5});
  Forest f(5);
  f.make_root(1);
  for (NodeId v = 2; v <= 5; ++v) {
    f.parent[v] = v - 1;
    f.depth[v] = 0;
    f.root[v] = 9;
  }
  Engine e(g);
  std::vector<std::uint64_t> val(6, 0);
  val[1] = 7;
  std::vector<char> served(6, 0);
  served[1] = 1;
  pull_broadcast(e, f, val, served, 4, 8);
  for (NodeId v = 1; v <= 5; ++v) {
    EXPECT_EQ(val[v], 7u);
    EXPECT_EQ(f.depth[v], v - 1);
    EXPECT_EQ(f.root[v], 1u);
  }
}

TEST(Primitives, SampleOnSpanningTreeIsNone) {
  const Graph g = generate({Family::kPath, 6});
  const Forest f = path_tree(6);
  Engine e(g, Budget{}, kDefaultMaxRounds, 1);
  const auto s = sample_outgoing_edge(e, f, [](NodeId, NodeId) { return true; }, 5,
                                      reps_for_nodes(6));
  for (NodeId v = 1; v <= 6; ++v) EXPECT_FALSE(s.edge[v].has_value());
  EXPECT_EQ(s.rounds, 15u + s.chunks);
  EXPECT_EQ(e.round(), s.rounds);
}

TEST(Primitives, SampleFindsTheBridge) {
  const Graph g = generate({Family::kDumbbell, 8});
  const Forest f = clique_stars();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Engine e(g, Budget{}, kDefaultMaxRounds, seed);
    const auto s = sample_outgoing_edge(e, f, [](NodeId, NodeId) { return true; }, 1,
                                        reps_for_nodes(8));
    for (NodeId v = 1; v <= 8; ++v) {
      ASSERT_TRUE(s.edge[v].has_value()) << seed << " " << v;
      const auto [a, b] = *s.edge[v];
      EXPECT_EQ(std::min(a, b), 4u);
      EXPECT_EQ(std::max(a, b), 5u);
    }
  }
}

TEST(Primitives, SampleRespectsKeepFilter) {
  const Graph g = generate({Family::kDumbbell, 8});
  const Forest f = clique_stars();
  Engine e(g, Budget{}, kDefaultMaxRounds, 2);
  const auto s = sample_outgoing_edge(
      e, f, [](NodeId a, NodeId b) { return std::min(a, b) != 4 || std::max(a, b) != 5; }, 1,
      reps_for_nodes(8));
  for (NodeId v = 1; v <= 8; ++v) EXPECT_FALSE(s.edge[v].has_value());
}

TEST(Primitives, SampleOnlyActiveRoots) {
  const Graph g = generate({Family::kDumbbell, 8});
  const Forest f = clique_stars();
  std::vector<char> active(9, 0);
  active[5] = 1;
  Engine e(g, Budget{}, kDefaultMaxRounds, 4);
  const auto s = sample_outgoing_edge(e, f, [](NodeId, NodeId) { return true; }, 1,
                                      reps_for_nodes(8), &active);
  for (NodeId v = 1; v <= 4; ++v) EXPECT_FALSE(s.edge[v].has_value());
  for (NodeId v = 5; v <= 8; ++v) EXPECT_TRUE(s.edge[v].has_value());
}

TEST(Primitives, SketchChunksFitBudget) {
  const SketchParams p{1, 1024ull * 1024, 30};
  const std::uint64_t budget = Budget{}.max_bits(1024ull * 1024);
  const std::uint32_t k = sketch_chunks(p, budget);
  EXPECT_GE(k, 1u);
  EXPECT_LE((p.total_bits() + k - 1) / k, budget);
}
