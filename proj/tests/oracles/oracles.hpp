#pragma once

// Independent reference implementations used by the tests. None of them
// reuse the code under test beyond plain data types.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <utility>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/general.hpp"
#include "gossip/graph.hpp"

namespace oracle {

using gossip::NodeId;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

struct UnionFind {
  std::vector<std::uint32_t> p;
  explicit UnionFind(std::uint32_t n) : p(n + 1) { std::iota(p.begin(), p.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Component label (smallest member) per node of the graph (1..n, edges).
inline std::vector<std::uint32_t> components(std::uint32_t n, const EdgeList& edges) {
  UnionFind uf(n);
  for (auto [a, b] : edges) uf.unite(a, b);
  std::vector<std::uint32_t> c(n + 1, 0);
  for (std::uint32_t v = 1; v <= n; ++v) c[v] = uf.find(v);
  return c;
}

// Same connectivity among the nodes in `nodes`.
inline bool same_components(std::uint32_t n, const EdgeList& a, const EdgeList& b,
                            const std::vector<char>& nodes) {
  const auto ca = components(n, a), cb = components(n, b);
  for (std::uint32_t u = 1; u <= n; ++u)
    for (std::uint32_t v = u + 1; v <= n; ++v)
      if (nodes[u] && nodes[v] && (ca[u] == ca[v]) != (cb[u] == cb[v])) return false;
  return true;
}

inline std::vector<std::vector<NodeId>> adjacency(std::uint32_t n, const EdgeList& edges) {
  std::vector<std::vector<NodeId>> adj(n + 1);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

inline std::vector<std::uint32_t> bfs(const std::vector<std::vector<NodeId>>& adj, NodeId s) {
  std::vector<std::uint32_t> d(adj.size(), UINT32_MAX);
  std::deque<NodeId> q{s};
  d[s] = 0;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    for (NodeId u : adj[v])
      if (d[u] == UINT32_MAX) {
        d[u] = d[v] + 1;
        q.push_back(u);
      }
  }
  return d;
}

// max over edges (u, v) of `base` of dist_sub(u, v); UINT32_MAX if some
// endpoint pair is disconnected in `sub`.
inline std::uint32_t stretch(std::uint32_t n, const EdgeList& base, const EdgeList& sub) {
  const auto adj = adjacency(n, sub);
  std::vector<std::vector<NodeId>> by_tail(n + 1);
  for (auto [a, b] : base) by_tail[std::min(a, b)].push_back(std::max(a, b));
  std::uint32_t worst = 0;
  for (NodeId u = 1; u <= n; ++u) {
    if (by_tail[u].empty()) continue;
    const auto d = bfs(adj, u);
    for (NodeId v : by_tail[u]) worst = std::max(worst, d[v]);
  }
  return worst;
}

inline std::uint32_t max_degree(std::uint32_t n, const EdgeList& edges) {
  std::vector<std::uint32_t> deg(n + 1, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return *std::max_element(deg.begin(), deg.end());
}

// Sum over the trees of a parent-pointer forest of their diameters.
inline std::uint64_t tree_diameter_sum(const std::vector<NodeId>& parent) {
  const auto n = static_cast<std::uint32_t>(parent.size() - 1);
  EdgeList e;
  for (NodeId v = 1; v <= n; ++v)
    if (parent[v]) e.emplace_back(v, parent[v]);
  const auto adj = adjacency(n, e);
  std::vector<char> seen(n + 1, 0);
  std::uint64_t total = 0;
  for (NodeId v = 1; v <= n; ++v) {
    if (seen[v] || adj[v].empty()) continue;
    auto d = bfs(adj, v);
    NodeId far = v;
    for (NodeId u = 1; u <= n; ++u)
      if (d[u] != UINT32_MAX) {
        seen[u] = 1;
        if (d[u] > d[far]) far = u;
      }
    const auto d2 = bfs(adj, far);
    std::uint32_t best = 0;
    for (NodeId u = 1; u <= n; ++u)
      if (d2[u] != UINT32_MAX) best = std::max(best, d2[u]);
    total += best;
  }
  return total;
}

// One synchronous CONGEST round, message by message: every node sends on
// every arc at once.
inline std::vector<gossip::MaybeMsg> congest_round(const gossip::ArcGraph& h,
                                                   const std::vector<gossip::MaybeMsg>& out) {
  std::vector<gossip::MaybeMsg> in(h.arcs());
  for (std::size_t a = 0; a < h.arcs(); ++a) in[h.rev(a)] = out[a];
  return in;
}

// MPX run directly in CONGEST for `rounds` rounds.
inline gossip::MpxClustering mpx_reference(const gossip::ArcGraph& h, std::vector<double> shifts,
                                           std::uint32_t rounds, std::uint64_t id_bits) {
  gossip::MpxProtocol p(h, std::move(shifts), id_bits);
  std::vector<gossip::MaybeMsg> out(h.arcs());
  for (std::uint32_t r = 0; r < rounds; ++r) {
    p.fill(out);
    p.consume(congest_round(h, out));
  }
  return p.result(rounds);
}

// Eccentricity of each node in a small graph given as adjacency lists.
inline std::vector<std::uint32_t> eccentricities(const std::vector<std::vector<NodeId>>& adj) {
  std::vector<std::uint32_t> ecc(adj.size(), 0);
  for (NodeId v = 1; v < adj.size(); ++v) {
    const auto d = bfs(adj, v);
    for (NodeId u = 1; u < adj.size(); ++u) ecc[v] = std::max(ecc[v], d[u]);
  }
  return ecc;
}

// Kruskal with a hand-rolled union-find.
inline std::vector<gossip::Edge> kruskal(const gossip::Graph& g) {
  auto es = g.edges();
  std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) { return a.w < b.w; });
  UnionFind uf(g.n());
  std::vector<gossip::Edge> out;
  for (const auto& e : es)
    if (uf.unite(e.u, e.v)) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
