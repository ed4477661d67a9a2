#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "gossip/common.hpp"

namespace gossip {

using Rational = boost::rational<std::int64_t>;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  std::uint64_t w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Family {
  kDumbbell,
  kCBarbell,
  kExpanderBarbell,
  kPath,
  kCycle,
  kComplete,
  kStar,
  kRandomRegular,
  kErdosRenyi,
  kFromFile,
};

Family parse_family(const std::string& name);
std::string family_name(Family family);

struct GraphSpec {
  Family family = Family::kPath;
  std::uint32_t n = 2;
  std::uint32_t c = 2;      // cliques / components for the barbell families
  std::uint32_t d = 3;      // degree for random_regular and expander_barbell
  double p = 0.1;           // erdos_renyi edge probability
  std::string path;         // from_file
  std::uint64_t seed = 1;
  bool weighted = false;    // distinct uniform weights in [1, n^4]
};

// Static undirected simple graph on nodes 1..n, adjacency sorted by ID.
class Graph {
 public:
  Graph() = default;

  // id_bound = 0 selects the default N = max(n^2, 4).
  static Graph from_edges(std::uint32_t n, std::vector<Edge> edges,
                          bool weighted = false, std::uint64_t id_bound = 0);

  std::uint32_t n() const { return n_; }
  std::uint64_t m() const { return adj_.size() / 2; }
  std::uint64_t id_bound() const { return id_bound_; }
  bool weighted() const { return weighted_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adj_.data() + off_[v], adj_.data() + off_[v + 1]};
  }
  std::span<const std::uint64_t> weights(NodeId v) const {
    return {w_.data() + off_[v], w_.data() + off_[v + 1]};
  }
  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(off_[v + 1] - off_[v]);
  }
  std::uint32_t max_degree() const;

  // Position of w in adj(u), or -1.
  std::int64_t neighbor_index(NodeId u, NodeId w) const;
  bool has_edge(NodeId u, NodeId w) const { return neighbor_index(u, w) >= 0; }
  std::uint64_t weight(NodeId u, NodeId w) const;

  // Each edge once with u < v, sorted.
  std::vector<Edge> edges() const;
  bool connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::uint32_t n_ = 0;
  std::uint64_t id_bound_ = 4;
  bool weighted_ = false;
  std::vector<std::uint64_t> off_{0, 0};
  std::vector<NodeId> adj_;
  std::vector<std::uint64_t> w_;
};

Graph generate(const GraphSpec& spec);

// Exact conductance by enumeration; n <= 20.
Rational conductance_exact(const Graph& g);

// Exact weak conductance by enumeration; n <= 12. An induced subgraph on a
// single node has conductance 1, a disconnected one has conductance 0.
Rational weak_conductance_exact(const Graph& g, Rational c);

// Conductance of one cut; in_s is indexed by node ID.
Rational cut_conductance(const Graph& g, const std::vector<char>& in_s);

// Conductance of the clique K_k: ceil(k/2) / (k-1).
double clique_conductance(std::uint32_t k);

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source);
std::uint32_t diameter(const Graph& g);

Graph load_edgelist(const std::string& path, std::uint64_t id_bound = 0);
void save_edgelist(const Graph& g, const std::string& path);

}  // namespace gossip
