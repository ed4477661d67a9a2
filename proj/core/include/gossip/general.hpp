#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/primitives.hpp"

namespace gossip {

struct GeneralConfig {
  double delta_exp = 0.5;
  double threshold_c = 4.0;  // high degree iff deg >= threshold_c * n^delta * ln n
  double discovery_c = 8.0;  // star discovery window: discovery_c * n^delta * ln n rounds
  double beta_mpx = 0.25;
  double c_kappa = 3.0;      // kappa = c_kappa * n^(1-delta) * log2 n
  double c_merge = 3.0;      // ceil(c_merge * log2 n) tree-merging phases
  double c_nbr = 4.0;        // kept edges per node <= c_nbr * log2 n
  double delta_sk = 0.05;    // sketch failure probability inside merge phases
  Budget budget{};
  std::uint64_t max_rounds = 0;  // 0 derives a cap
  std::uint64_t rumor = 1;
};

// Degree threshold, discovery window and the other schedule constants, all
// computable locally from n and the config.
struct GeneralSchedule {
  std::uint32_t threshold = 0;
  std::uint32_t discovery = 0;
  std::uint32_t kappa = 0;
  std::uint32_t merge_phases = 0;
  std::uint32_t kept_bound = 0;
  std::uint32_t mpx_rounds = 0;
  double shift_cap = 0;
  std::uint32_t merge_reps = 0;
  std::uint32_t check_reps = 0;
};
GeneralSchedule general_schedule(std::uint32_t n, const GeneralConfig& cfg);

// ---- MPX clustering ----

struct MpxClustering {
  std::vector<NodeId> root;  // cluster root, by node
  std::vector<NodeId> parent;
  std::vector<std::uint32_t> depth;
  std::vector<double> shift;
  std::uint32_t rounds = 0;  // simulated CONGEST rounds

  Forest forest() const;
  std::uint32_t clusters() const;
};

// Exponential shifts of rate beta, redrawn while above cap.
std::vector<double> mpx_shifts(Engine& e, double beta, double cap);

// Delayed-BFS MPX as a CONGEST protocol, split so that any executor can
// drive it: fill() writes one round's outgoing messages per arc, consume()
// reads what arrived. Every node joins the root maximizing shift - distance
// (ties to the smaller root ID).
class MpxProtocol {
 public:
  MpxProtocol(const ArcGraph& h, std::vector<double> shifts, std::uint64_t id_bits);
  void fill(std::vector<MaybeMsg>& out) const;
  void consume(const std::vector<MaybeMsg>& in);
  MpxClustering result(std::uint32_t rounds) const;

 private:
  const ArcGraph* h_;
  std::vector<double> shift_;
  std::vector<double> val_;
  std::vector<NodeId> root_;
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> hops_;
  std::vector<char> changed_;
  std::uint64_t id_bits_;
};

// Runs `rounds` simulated CONGEST rounds of MpxProtocol over h with the
// cover ownership rule. shifts empty draws fresh ones from node RNGs.
MpxClustering mpx_decompose(Engine& e, const ArcGraph& h, const std::vector<char>& cover,
                            std::uint32_t delta_th, double beta_mpx,
                            std::vector<double> shifts = {}, std::uint32_t rounds = 0);

// ---- sparse subgraph ----

struct SparseSubgraph {
  std::uint32_t n = 0;
  std::vector<char> star;
  std::vector<char> low;   // L: non-star nodes below the degree threshold
  std::vector<char> hbar;  // S and H
  Forest forest;           // spanning trees over hbar; their edges are E'_Hbar
  MpxClustering mpx;
  // E'_L as (driver, other): the driver kept the edge and contacts over it.
  std::vector<std::pair<NodeId, NodeId>> el_prime;
  GeneralSchedule sched;
  std::uint32_t fallback_stars = 0;
  std::uint32_t merge_phases_run = 0;
  std::uint32_t soundness_violations = 0;

  std::vector<std::pair<NodeId, NodeId>> e_hbar_prime() const;
  std::vector<std::pair<NodeId, NodeId>> e_l_prime() const;  // normalized a < b
  std::uint32_t max_kept() const;
};

// Edges of g with both endpoints in hbar, resp. the rest.
std::vector<std::pair<NodeId, NodeId>> e_hbar(const Graph& g, const SparseSubgraph& s);
std::vector<std::pair<NodeId, NodeId>> e_l(const Graph& g, const SparseSubgraph& s);

SparseSubgraph sparsify(Engine& e, const GeneralConfig& cfg);

struct SparsifyResult {
  SparseSubgraph sparse;
  Trace trace;
};
SparsifyResult sparsify(const Graph& g, const GeneralConfig& cfg, std::uint64_t seed);

// ---- rumor spreading ----

struct GeneralStats {
  std::uint32_t epochs = 0;
  std::uint64_t final_d_est = 0;
  std::uint64_t spread_phases = 0;
  std::uint64_t sparsify_rounds = 0;
  bool halted_spanning = false;  // ground truth at the halting verdict
};

struct GeneralResult {
  Trace trace;
  SparseSubgraph sparse;
  Forest tree;  // first-receipt parents, rooted at the source
  std::vector<std::uint64_t> rumor;
  GeneralStats stats;
};

std::uint64_t general_round_cap(std::uint32_t n, const GeneralConfig& cfg);

// Spreading from every node with a nonzero initial value; nodes adopt
// strictly larger values and re-parent toward the sender. tree then holds
// one tree per surviving value, rooted where it started.
GeneralResult spread_general(const Graph& g, const std::vector<std::uint64_t>& initial,
                             const GeneralConfig& cfg, std::uint64_t seed);

GeneralResult rumor_spread_general(const Graph& g, NodeId source, const GeneralConfig& cfg,
                                   std::uint64_t seed);

}  // namespace gossip
