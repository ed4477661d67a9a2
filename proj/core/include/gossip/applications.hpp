#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/general.hpp"
#include "gossip/primitives.hpp"
#include "gossip/weakcond.hpp"

namespace gossip {

// What every rumor-spreading run leaves behind: first-receipt parents and
// per-node rumor values.
struct SpreadRun {
  NodeId source = 0;
  Forest tree;
  std::vector<std::uint64_t> rumor;
  Trace trace;
};

SpreadRun spread_run(const WeakCondResult& r, NodeId source);
SpreadRun spread_run(const GeneralResult& r, NodeId source);

// Baseline: every node calls a uniform random neighbor each round and the
// rumor crosses in both directions. Runs until all nodes hold the rumor
// (checked by the simulator) or max_rounds, whichever comes first.
SpreadRun uniform_push_pull(const Graph& g, NodeId source, std::uint64_t seed,
                            std::uint64_t max_rounds = kDefaultMaxRounds, Budget budget = {},
                            std::uint64_t rumor = 1);

// The first-receipt tree of a finished spread. Throws spread-incomplete if
// some node lacks the rumor or the parents do not form one tree rooted at
// the source with depth <= rounds used.
Forest extract_spanning_tree(const Graph& g, const SpreadRun& run);

// ---- leader election ----

enum class LeaderAlgorithm { kWeakCond, kGeneral };

struct LeaderResult {
  std::vector<NodeId> leader;  // per node
  Forest tree;
  Trace trace;
};

LeaderResult leader_election(const Graph& g, LeaderAlgorithm algo, std::uint64_t seed,
                             const WeakCondConfig& wc = {}, const GeneralConfig& gc = {});

// ---- aggregates ----

enum class AggOp { kMin, kMax, kSum, kCount, kAverage };

std::string agg_op_name(AggOp op);
AggOp parse_agg_op(const std::string& s);

struct AggregateSpec {
  AggOp op = AggOp::kSum;
  std::uint32_t value_bits = 64;  // inputs must fit; results too for sum
};

// kAverage yields (sum, count); the others leave count at the node count.
struct AggValue {
  std::uint64_t value = 0;
  std::uint64_t count = 0;
  friend bool operator==(const AggValue&, const AggValue&) = default;
};

struct AggregateResult {
  std::vector<AggValue> result;  // per node
  Trace trace;
};

// One convergecast and one broadcast over a spanning tree with exact depths.
// Throws width-overflow if values or partial sums exceed value_bits or the
// message would not fit the budget.
std::vector<AggValue> aggregate(Engine& e, const Forest& tree, const AggregateSpec& spec,
                                const std::vector<std::uint64_t>& values);
AggregateResult aggregate(const Graph& g, const Forest& tree, const AggregateSpec& spec,
                          const std::vector<std::uint64_t>& values, Budget budget = {},
                          std::uint64_t seed = 0);

// ---- minimum spanning tree ----

struct MstConfig {
  double c_f = 2.0;  // stage-1 fragments stop initiating beyond c_f * sqrt(n) diameter
  Budget budget{};
  std::uint64_t max_rounds = 0;  // 0 derives a cap
};

struct MstStats {
  std::uint32_t stage1_phases = 0;
  std::uint32_t stage2_phases = 0;
  std::uint32_t fragments_after_stage1 = 0;
  std::uint32_t cut_rule_violations = 0;
  std::uint64_t stage1_rounds = 0;
  std::uint64_t stage2_rounds = 0;
};

struct MstResult {
  std::vector<Edge> edges;  // sorted (u < v)
  Trace trace;
  MstStats stats;
};

// Two-stage Boruvka on a graph with distinct weights. backbone must be a
// spanning tree of g with exact depths (e.g. from extract_spanning_tree).
MstResult mst(const Graph& g, const Forest& backbone, const MstConfig& cfg, std::uint64_t seed);

// Runs the general spreader from node 1 for the backbone, then mst().
// The returned trace covers both.
MstResult mst(const Graph& g, const MstConfig& cfg, const GeneralConfig& gc, std::uint64_t seed);

// Sequential Kruskal, for checking.
std::vector<Edge> kruskal_mst(const Graph& g);

}  // namespace gossip
