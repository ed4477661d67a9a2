#pragma once

#include <cstdint>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/primitives.hpp"

namespace gossip {

// ---- set-up ----

struct SetupState {
  std::vector<char> covered;
  Forest forest;  // spans the covered nodes; depths are upper bounds until relabeled
};

SetupState make_setup_state(std::uint32_t n);

// One set-up phase of 6T rounds: forest from uncovered nodes, pruning by
// max-ID spreading, partial broadcast to depth 2T, and the merge.
void setup_phase(Engine& e, SetupState& s, std::uint64_t t);

struct SetupResult {
  Forest clusters;  // exact depths and root labels
  std::uint32_t roots = 0;
  std::uint32_t max_depth = 0;
  bool covered_all = false;
};

// floor(c) phases followed by a 2T-round relabeling pull broadcast.
// Nodes left uncovered become singleton clusters.
SetupResult setup(Engine& e, double c, double phi, double alpha = 8.0);

// ---- super clusters ----

// Cluster trees plus inter-cluster edges, each driven by one responsible
// endpoint: resp[v] is the other endpoint of v's edge, 0 if none.
struct SuperClusters {
  Forest trees;
  std::vector<NodeId> resp;
  std::uint32_t tb = 0;  // depth bound of the cluster trees

  static SuperClusters from_forest(const Forest& trees, std::uint32_t tb);
  // Throws responsibility-violation if v already drives an edge.
  void assign(NodeId v, NodeId u);
};

// Clusters (by root ID) grouped into super clusters; label = smallest root.
std::vector<NodeId> super_cluster_of_root(const SuperClusters& sc);

enum class FloodOp { kMax, kMin };

// `iterations` supergraph iterations; each is a root broadcast (tb rounds),
// one exchange over every responsible edge, and a convergecast (tb rounds).
// root_value is indexed by root ID; returns the values after the flood.
std::vector<std::uint64_t> flood(Engine& e, const SuperClusters& sc, std::uint32_t iterations,
                                 std::vector<std::uint64_t> root_value, FloodOp op,
                                 std::uint64_t value_bits);

// True exactly at the max-root-ID cluster of each super cluster whose
// supergraph eccentricity is at most beta. Indexed by root ID.
std::vector<char> eccentricity_at_most(Engine& e, const SuperClusters& sc, std::uint32_t beta);

struct Reoriented {
  Forest tree;                // reoriented trees; other clusters unchanged
  std::vector<char> centers;  // root IDs of the new trees, by node ID
  std::uint32_t depth_bound = 0;
  bool complete = true;       // every cluster of each chosen super cluster was reached
};

// Depth bound of a tree reoriented over beta supergraph hops.
std::uint32_t reoriented_depth_bound(std::uint32_t tb, std::uint32_t beta);

// Re-roots every super cluster that has a center at the center cluster's
// root, parents pointing toward first arrival. With centers == nullptr an
// ID flood of beta iterations picks the max-root-ID cluster as center.
// Throws precondition-unverified if no super cluster has a center.
Reoriented reorient(Engine& e, const SuperClusters& sc, std::uint32_t beta,
                    const std::vector<char>* centers);

// ---- rumor spreading ----

struct WeakCondConfig {
  double c = 1.0;
  double phi = 1.0;
  double alpha = 8.0;
  Budget budget{};
  std::uint32_t reps = 0;        // 0 selects ceil(3 log2 n)
  std::uint64_t max_rounds = 0;  // 0 derives a cap from the schedule
  std::uint32_t stall_retries = 3;
  std::uint64_t rumor = 1;
};

struct WeakCondStats {
  std::uint64_t t = 0;
  std::uint32_t setup_roots = 0;
  std::uint32_t setup_max_depth = 0;
  bool setup_covered = false;
  std::uint32_t merge_phases = 0;
  std::uint32_t retries = 0;
  std::uint32_t invariant_violations = 0;
  std::uint32_t soundness_violations = 0;
  std::vector<std::uint32_t> min_cluster_count;  // smallest super cluster after each phase
};

struct WeakCondResult {
  Trace trace;
  Forest clusters;
  Forest tree;  // first-receipt parents, rooted at the source
  std::vector<std::uint64_t> rumor;
  WeakCondStats stats;
};

std::uint64_t weakcond_round_cap(std::uint32_t n, const WeakCondConfig& cfg,
                                 std::uint64_t budget_bits, std::uint64_t id_bound);

WeakCondResult rumor_spread_weakcond(const Graph& g, NodeId source, const WeakCondConfig& cfg,
                                     std::uint64_t seed);

// Same pipeline without a rumor: the root of the final tree broadcasts its
// ID, rumor[v] holds the leader seen by v and tree is the final tree.
WeakCondResult elect_leader_weakcond(const Graph& g, const WeakCondConfig& cfg, std::uint64_t seed);

}  // namespace gossip
