#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gossip/common.hpp"
#include "gossip/engine.hpp"
#include "gossip/sketch.hpp"

namespace gossip {

// T(n) = ceil(alpha * ln n / phi), at least 1.
std::uint64_t t_rounds(std::uint32_t n, double phi, double alpha = 8.0);

// Parent-pointer forest. root[v] == 0 means v is not in the forest; a root
// has parent 0 and root[v] == v.
struct Forest {
  std::vector<NodeId> parent;
  std::vector<std::uint32_t> depth;
  std::vector<NodeId> root;

  Forest() = default;
  explicit Forest(std::uint32_t n) : parent(n + 1, 0), depth(n + 1, 0), root(n + 1, 0) {}

  std::uint32_t n() const { return parent.empty() ? 0 : static_cast<std::uint32_t>(parent.size() - 1); }
  bool in_forest(NodeId v) const { return root[v] != 0; }
  bool is_root(NodeId v) const { return root[v] != 0 && parent[v] == 0; }
  std::uint32_t max_depth() const;
  std::vector<NodeId> roots() const;
  void make_root(NodeId v) {
    parent[v] = 0;
    depth[v] = 0;
    root[v] = v;
  }

  friend bool operator==(const Forest&, const Forest&) = default;
};

bool forest_acyclic(const Forest& f);
// Acyclic, depth(child) = depth(parent) + 1, same root label along edges,
// and every parent edge is an edge of g.
bool forest_consistent(const Graph& g, const Forest& f);

// Uniform push-pull max-rumor exchange for `rounds` rounds. rumor[v] == 0
// means none. Returns per-node max seen.
std::vector<std::uint64_t> spread_max_rumor(Engine& e, std::vector<std::uint64_t> rumor,
                                            std::uint64_t rounds);

// Same exchange with parent adoption on every improvement; sources carry
// their own ID as rumor. root[] holds the adopted rumor (a root ID); depth
// is the stored hop counter, which is exact only if no ancestor upgraded
// after a child adopted it.
Forest build_forest(Engine& e, const std::vector<char>& source, std::uint64_t rounds);

// ---- waves over a forest ----

namespace detail {

inline std::vector<std::vector<NodeId>> depth_buckets(const Forest& f, std::uint32_t limit,
                                                      const std::vector<char>* active_root) {
  std::vector<std::vector<NodeId>> b(limit + 1);
  for (NodeId v = 1; v <= f.n(); ++v) {
    if (!f.in_forest(v) || f.parent[v] == 0) continue;
    if (active_root && !(*active_root)[f.root[v]]) continue;
    if (f.depth[v] <= limit) b[f.depth[v]].push_back(v);
  }
  return b;
}

struct Ack {
  std::uint64_t bits() const { return 1; }
};

}  // namespace detail

// Scheduled broadcast: the node at depth k pulls from its parent in the
// k-th round and stores map(k_node, parent's value). value[] holds the
// roots' payloads on entry; on exit every node at depth <= limit of an
// active tree holds a value. Always consumes exactly `limit` rounds.
template <class T, class Bits, class Map>
void broadcast_map(Engine& e, const Forest& f, std::vector<std::optional<T>>& value,
                   std::uint32_t limit, Bits bits, Map map,
                   const std::vector<char>* active_root = nullptr) {
  struct Wave {
    using Msg = detail::Ack;
    struct Reply {
      const T* v;
      std::uint64_t b;
      std::uint64_t bits() const { return b; }
    };
    const Forest* f;
    std::vector<std::optional<T>>* value;
    Bits* bits;
    Map* map;
    std::vector<std::vector<NodeId>> buckets;
    std::uint32_t k = 1;
    void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
      for (NodeId v : buckets[k]) c.emplace_back(v, f->parent[v]);
    }
    Msg payload(NodeId, NodeId) { return {}; }
    Reply on_exchange(NodeId w, NodeId, const Msg&) {
      const auto& v = (*value)[w];
      if (!v) return {nullptr, 1};
      return {&*v, 1 + static_cast<std::uint64_t>((*bits)(*v))};
    }
    void on_reply(NodeId u, NodeId, const Reply& r) {
      if (r.v) (*value)[u] = (*map)(u, *r.v);
    }
    void local_step(Engine&, std::uint64_t) { ++k; }
    bool halted() const { return false; }
  };
  Wave w{&f, &value, &bits, &map, detail::depth_buckets(f, limit, active_root)};
  std::uint32_t last = 0;
  for (std::uint32_t d = limit; d >= 1; --d)
    if (!w.buckets[d].empty()) {
      last = d;
      break;
    }
  e.execute(w, last);
  e.idle(limit - last);
}

template <class T, class Bits>
void broadcast(Engine& e, const Forest& f, std::vector<std::optional<T>>& value,
               std::uint32_t limit, Bits bits, const std::vector<char>* active_root = nullptr) {
  broadcast_map(e, f, value, limit, bits, [](NodeId, const T& v) { return v; }, active_root);
}

// Scheduled convergecast: the node at depth k pushes its accumulated value
// to its parent in round limit - k. acc[] holds own values on entry and
// subtree aggregates on exit. Always consumes exactly `limit` rounds.
template <class T, class Op, class Bits>
void convergecast(Engine& e, const Forest& f, std::vector<T>& acc, std::uint32_t limit, Op op,
                  Bits bits, const std::vector<char>* active_root = nullptr) {
  struct Wave {
    struct Msg {
      const T* v;
      std::uint64_t b;
      std::uint64_t bits() const { return b; }
    };
    using Reply = detail::Ack;
    const Forest* f;
    std::vector<T>* acc;
    Op* op;
    Bits* bits;
    std::vector<std::vector<NodeId>> buckets;
    std::uint32_t k;
    void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
      for (NodeId v : buckets[k]) c.emplace_back(v, f->parent[v]);
    }
    Msg payload(NodeId u, NodeId) {
      return {&(*acc)[u], static_cast<std::uint64_t>((*bits)((*acc)[u]))};
    }
    Reply on_exchange(NodeId w, NodeId, const Msg& m) {
      (*op)((*acc)[w], *m.v);
      return {};
    }
    void on_reply(NodeId, NodeId, const Reply&) {}
    void local_step(Engine&, std::uint64_t) { --k; }
    bool halted() const { return false; }
  };
  if (limit == 0) return;
  Wave w{&f, &acc, &op, &bits, detail::depth_buckets(f, limit, active_root), 0};
  std::uint32_t deepest = 0;
  for (std::uint32_t d = limit; d >= 1; --d)
    if (!w.buckets[d].empty()) {
      deepest = d;
      break;
    }
  w.k = deepest;
  e.idle(limit - deepest);
  e.execute(w, deepest);
}

// Unscheduled pull broadcast along parent pointers: every in-forest node
// that does not yet hold a value pulls from its parent each round, for
// `rounds` rounds. Receivers set depth = parent's depth + 1 and adopt the
// parent's root label, so stale labels are repaired on the way.
// served[v] is set for nodes that received (or started with) a value.
void pull_broadcast(Engine& e, Forest& f, std::vector<std::uint64_t>& value,
                    std::vector<char>& served, std::uint64_t rounds, std::uint64_t value_bits);

// Fresh per-root randomness, node sketches under `keep`, chunked pipelined
// convergecast, root-side sampling, and a broadcast of the result. Returns
// the sampled edge as known at every node of each active tree.
// Consumes 3 * depth_bound + chunks rounds.
struct EdgeSample {
  std::vector<std::optional<std::pair<NodeId, NodeId>>> edge;  // per node
  std::uint64_t rounds = 0;
  std::uint32_t chunks = 0;
};
EdgeSample sample_outgoing_edge(Engine& e, const Forest& f, const EdgeKeep& keep,
                                std::uint32_t depth_bound, std::uint32_t reps,
                                const std::vector<char>* active_root = nullptr,
                                std::uint64_t tag = 0);

// Chunks needed to fit one sketch of these params into the message budget.
std::uint32_t sketch_chunks(const SketchParams& p, std::uint64_t budget_bits);

}  // namespace gossip
