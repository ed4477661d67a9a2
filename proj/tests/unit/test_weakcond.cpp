#include <gtest/gtest.h>

#include <algorithm>

#include "gossip/applications.hpp"
#include "gossip/harness.hpp"
#include "gossip/weakcond.hpp"
#include "oracles/oracles.hpp"

using namespace gossip;

namespace {

// Path on 12 nodes cut into four 3-node cluster paths rooted at their
// first node; consecutive clusters are joined by one responsible edge.
SuperClusters path_clusters(std::uint32_t clusters) {
  const std::uint32_t n = 3 * clusters;
  Forest f(n);
  for (std::uint32_t i = 0; i < clusters; ++i) {
    const NodeId r = 3 * i + 1;
    f.make_root(r);
    for (NodeId v = r + 1; v < r + 3; ++v) {
      f.parent[v] = v - 1;
      f.depth[v] = v - r;
      f.root[v] = r;
    }
  }
  SuperClusters sc = SuperClusters::from_forest(f, 2);
  for (std::uint32_t i = 0; i + 1 < clusters; ++i) sc.assign(3 * i + 3, 3 * i + 4);
  return sc;
}

}  // namespace

TEST(WeakCond, SetupOnCompleteCoversEverything) {
  const Graph g = generate({Family::kComplete, 64});
  Engine e(g, Budget{}, kDefaultMaxRounds, 1);
  const WeakParams w = family_weak_params({Family::kComplete, 64});
  const std::uint64_t t = t_rounds(64, w.phi);
  const SetupResult s = setup(e, w.c, w.phi);
  EXPECT_TRUE(s.covered_all);
  EXPECT_GE(s.roots, 1u);
  EXPECT_TRUE(forest_consistent(g, s.clusters));
  EXPECT_LE(s.max_depth, 2 * t);
  EXPECT_EQ(e.round(), 6 * t + 2 * t);
}

TEST(WeakCond, AssignTwiceIsAViolation) {
  SuperClusters sc = path_clusters(2);
  try {
    sc.assign(3, 4);
    FAIL();
  } catch (const Error& x) {
    EXPECT_EQ(x.kind(), ErrorKind::kResponsibilityViolation);
  }
}

TEST(WeakCond, FloodMatchesSupergraphBfs) {
  const std::uint32_t k = 4, n = 3 * k;
  const Graph g = generate({Family::kPath, n});
  const SuperClusters sc = path_clusters(k);
  oracle::EdgeList super;
  for (std::uint32_t i = 0; i + 1 < k; ++i) super.emplace_back(i + 1, i + 2);
  for (std::uint32_t it = 0; it <= 3; ++it) {
    Engine e(g);
    std::vector<std::uint64_t> val(n + 1, 0);
    for (std::uint32_t i = 0; i < k; ++i) val[3 * i + 1] = 3 * i + 1;
    const auto out = flood(e, sc, it, val, FloodOp::kMax, 8);
    EXPECT_EQ(e.round(), it * (2 * 2 + 1));
    for (std::uint32_t i = 1; i <= k; ++i) {
      const auto d = oracle::bfs(oracle::adjacency(k, super), i);
      std::uint64_t want = 0;
      for (std::uint32_t j = 1; j <= k; ++j)
        if (d[j] <= it) want = std::max<std::uint64_t>(want, 3 * (j - 1) + 1);
      EXPECT_EQ(out[3 * (i - 1) + 1], want) << "iterations " << it << " cluster " << i;
    }
  }
}

TEST(WeakCond, SuperClusterLabels) {
  const SuperClusters sc = path_clusters(4);
  const auto lab = super_cluster_of_root(sc);
  for (NodeId r : {1u, 4u, 7u, 10u}) EXPECT_EQ(lab[r], 1u);
}

TEST(WeakCond, EccentricityThreshold) {
  const Graph g = generate({Family::kPath, 12});
  const SuperClusters sc = path_clusters(4);
  // The max-ID cluster (root 10) sits at one end: eccentricity 3.
  {
    Engine e(g);
    const auto ok = eccentricity_at_most(e, sc, 3);
    for (NodeId r : {1u, 4u, 7u}) EXPECT_FALSE(ok[r]);
    EXPECT_TRUE(ok[10]);
  }
  {
    Engine e(g);
    const auto ok = eccentricity_at_most(e, sc, 2);
    for (NodeId r : {1u, 4u, 7u, 10u}) EXPECT_FALSE(ok[r]);
  }
}

TEST(WeakCond, ReorientAtMaxCluster) {
  const Graph g = generate({Family::kPath, 12});
  const SuperClusters sc = path_clusters(4);
  Engine e(g);
  const Reoriented r = reorient(e, sc, 3, nullptr);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.tree.roots(), std::vector<NodeId>{10});
  EXPECT_TRUE(forest_consistent(g, r.tree));
  EXPECT_LE(r.tree.max_depth(), r.depth_bound);
  EXPECT_EQ(r.depth_bound, reoriented_depth_bound(2, 3));
}

TEST(WeakCond, ReorientWithoutCenterThrows) {
  const Graph g = generate({Family::kPath, 12});
  const SuperClusters sc = path_clusters(4);
  Engine e(g);
  const std::vector<char> none(13, 0);
  try {
    reorient(e, sc, 3, &none);
    FAIL();
  } catch (const Error& x) {
    EXPECT_EQ(x.kind(), ErrorKind::kPreconditionUnverified);
  }
}

class WeakCondSpread : public ::testing::TestWithParam<std::pair<Family, std::uint32_t>> {};

TEST_P(WeakCondSpread, EveryNodeGetsTheRumor) {
  GraphSpec spec{GetParam().first, GetParam().second};
  spec.c = 4;
  const Graph g = generate(spec);
  const WeakParams w = family_weak_params(spec);
  WeakCondConfig cfg;
  cfg.c = w.c;
  cfg.phi = w.phi;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const WeakCondResult r = rumor_spread_weakcond(g, 1, cfg, seed);
    for (NodeId v = 1; v <= g.n(); ++v) ASSERT_EQ(r.rumor[v], 1u) << v;
    const Forest t = extract_spanning_tree(g, spread_run(r, 1));
    EXPECT_TRUE(forest_consistent(g, t));
    EXPECT_LE(r.trace.max_message_bits, cfg.budget.max_bits(g.id_bound()));
    EXPECT_EQ(r.stats.invariant_violations, 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, WeakCondSpread,
                         ::testing::Values(std::pair{Family::kDumbbell, 64u},
                                           std::pair{Family::kCBarbell, 64u},
                                           std::pair{Family::kComplete, 32u},
                                           std::pair{Family::kPath, 30u}));

TEST(WeakCond, LeaderIsUnanimous) {
  const Graph g = generate({Family::kDumbbell, 32});
  const WeakParams w = family_weak_params({Family::kDumbbell, 32});
  WeakCondConfig cfg;
  cfg.c = w.c;
  cfg.phi = w.phi;
  const WeakCondResult r = elect_leader_weakcond(g, cfg, 7);
  ASSERT_EQ(r.tree.roots().size(), 1u);
  for (NodeId v = 1; v <= 32; ++v) EXPECT_EQ(r.rumor[v], r.tree.roots()[0]);
}

TEST(WeakCond, BadSourceRejected) {
  const Graph g = generate({Family::kPath, 4});
  EXPECT_THROW(rumor_spread_weakcond(g, 9, {}, 1), Error);
}

TEST(WeakCond, SameSeedSameTrace) {
  const Graph g = generate({Family::kDumbbell, 32});
  WeakCondConfig cfg;
  cfg.c = 2;
  cfg.phi = 2.0 / 3;
  EXPECT_EQ(rumor_spread_weakcond(g, 3, cfg, 5).trace, rumor_spread_weakcond(g, 3, cfg, 5).trace);
}
