#include "gossip/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace gossip {

namespace {

constexpr int kGenerateRetries = 2000;

std::vector<Edge> clique_edges(NodeId first, std::uint32_t k) {
  std::vector<Edge> out;
  for (NodeId a = first; a < first + k; ++a)
    for (NodeId b = a + 1; b < first + k; ++b) out.push_back({a, b, 0});
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidParameters, what);
}

// Pairing model; returns false on a loop or a multi-edge.
bool try_regular(std::uint32_t n, std::uint32_t d, NodeId first, SplitMix64& rng,
                 std::vector<Edge>& out) {
  std::vector<NodeId> points;
  points.reserve(static_cast<std::size_t>(n) * d);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t j = 0; j < d; ++j) points.push_back(first + v);
  std::shuffle(points.begin(), points.end(), rng);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points.size());
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
    NodeId a = points[i], b = points[i + 1];
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    if (!seen.insert((static_cast<std::uint64_t>(a) << 32) | b).second) return false;
    edges.push_back({a, b, 0});
  }
  out.insert(out.end(), edges.begin(), edges.end());
  return true;
}

bool edges_connected(std::uint32_t n, const std::vector<Edge>& edges, NodeId first) {
  if (n <= 1) return true;
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::uint32_t comps = n;
  for (const Edge& e : edges) {
    NodeId a = find(e.u - first), b = find(e.v - first);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

std::vector<Edge> random_regular_edges(std::uint32_t n, std::uint32_t d, NodeId first,
                                       SplitMix64& rng) {
  for (int attempt = 0; attempt < kGenerateRetries; ++attempt) {
    std::vector<Edge> edges;
    if (try_regular(n, d, first, rng, edges) && edges_connected(n, edges, first))
      return edges;
  }
  throw Error(ErrorKind::kDisconnectedSample,
              "random_regular: no simple connected sample within retry cap");
}

void assign_weights(std::uint32_t n, std::vector<Edge>& edges, SplitMix64& rng) {
  const auto nn = static_cast<std::uint64_t>(n);
  const std::uint64_t top = nn * nn * nn * nn;
  std::unordered_set<std::uint64_t> used;
  used.reserve(edges.size() * 2);
  for (Edge& e : edges) {
    std::uint64_t w;
    do {
      w = 1 + uniform_below(rng, top);
    } while (!used.insert(w).second);
    e.w = w;
  }
}

}  // namespace

Family parse_family(const std::string& name) {
  if (name == "dumbbell") return Family::kDumbbell;
  if (name == "c_barbell") return Family::kCBarbell;
  if (name == "expander_barbell") return Family::kExpanderBarbell;
  if (name == "path") return Family::kPath;
  if (name == "cycle") return Family::kCycle;
  if (name == "complete") return Family::kComplete;
  if (name == "star") return Family::kStar;
  if (name == "random_regular") return Family::kRandomRegular;
  if (name == "erdos_renyi") return Family::kErdosRenyi;
  if (name == "from_file") return Family::kFromFile;
  throw Error(ErrorKind::kInvalidParameters, "unknown family '" + name + "'");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::kDumbbell: return "dumbbell";
    case Family::kCBarbell: return "c_barbell";
    case Family::kExpanderBarbell: return "expander_barbell";
    case Family::kPath: return "path";
    case Family::kCycle: return "cycle";
    case Family::kComplete: return "complete";
    case Family::kStar: return "star";
    case Family::kRandomRegular: return "random_regular";
    case Family::kErdosRenyi: return "erdos_renyi";
    case Family::kFromFile: return "from_file";
  }
  return "unknown";
}

Graph Graph::from_edges(std::uint32_t n, std::vector<Edge> edges, bool weighted,
                        std::uint64_t id_bound) {
  Graph g;
  g.n_ = n;
  const auto nn = static_cast<std::uint64_t>(n);
  g.id_bound_ = id_bound ? id_bound : std::max<std::uint64_t>(nn * nn, 4);
  if (g.id_bound_ < n) throw Error(ErrorKind::kIdOutOfRange, "id bound below n");
  g.weighted_ = weighted;
  std::vector<std::uint32_t> deg(n + 2, 0);
  for (Edge& e : edges) {
    if (e.u == 0 || e.v == 0 || e.u > n || e.v > n)
      throw Error(ErrorKind::kIdOutOfRange, "edge endpoint outside 1..n");
    if (e.u == e.v) throw Error(ErrorKind::kInvalidParameters, "self-loop");
    if (e.u > e.v) std::swap(e.u, e.v);
    ++deg[e.u];
    ++deg[e.v];
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
      throw Error(ErrorKind::kInvalidParameters, "parallel edge");
  g.off_.assign(n + 2, 0);
  for (NodeId v = 1; v <= n; ++v) g.off_[v + 1] = g.off_[v] + deg[v];
  g.adj_.assign(g.off_[n + 1], 0);
  g.w_.assign(g.off_[n + 1], 0);
  std::vector<std::uint64_t> fill(g.off_.begin(), g.off_.end());
  for (const Edge& e : edges) {
    g.adj_[fill[e.u]] = e.v;
    g.w_[fill[e.u]++] = e.w;
    g.adj_[fill[e.v]] = e.u;
    g.w_[fill[e.v]++] = e.w;
  }
  for (NodeId v = 1; v <= n; ++v) {
    const auto b = g.off_[v], en = g.off_[v + 1];
    std::vector<std::pair<NodeId, std::uint64_t>> tmp;
    tmp.reserve(en - b);
    for (auto i = b; i < en; ++i) tmp.emplace_back(g.adj_[i], g.w_[i]);
    std::sort(tmp.begin(), tmp.end());
    for (auto i = b; i < en; ++i) {
      g.adj_[i] = tmp[i - b].first;
      g.w_[i] = tmp[i - b].second;
    }
  }
  return g;
}

std::uint32_t Graph::max_degree() const {
  std::uint32_t best = 0;
  for (NodeId v = 1; v <= n_; ++v) best = std::max(best, degree(v));
  return best;
}

std::int64_t Graph::neighbor_index(NodeId u, NodeId w) const {
  if (u == 0 || u > n_) return -1;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), w);
  if (it == nb.end() || *it != w) return -1;
  return it - nb.begin();
}

std::uint64_t Graph::weight(NodeId u, NodeId w) const {
  const auto i = neighbor_index(u, w);
  if (i < 0) throw Error(ErrorKind::kInvalidParameters, "weight of a non-edge");
  return w_[off_[u] + i];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m());
  for (NodeId u = 1; u <= n_; ++u) {
    auto nb = neighbors(u);
    auto ws = weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (u < nb[i]) out.push_back({u, nb[i], ws[i]});
  }
  return out;
}

bool Graph::connected() const {
  if (n_ <= 1) return true;
  const auto dist = bfs_distances(*this, 1);
  return std::all_of(dist.begin() + 1, dist.end(),
                     [](std::uint32_t d) { return d != UINT32_MAX; });
}

Graph generate(const GraphSpec& spec) {
  const std::uint32_t n = spec.n;
  SplitMix64 rng(derive_seed(spec.seed, 0x67656e));
  std::vector<Edge> edges;
  switch (spec.family) {
    case Family::kDumbbell:
    case Family::kCBarbell: {
      const std::uint32_t c = spec.family == Family::kDumbbell ? 2 : spec.c;
      require(n >= 1 && c >= 1 && n % c == 0, "c_barbell needs c >= 1 dividing n");
      const std::uint32_t k = n / c;
      for (std::uint32_t i = 0; i < c; ++i) {
        auto part = clique_edges(i * k + 1, k);
        edges.insert(edges.end(), part.begin(), part.end());
        if (i + 1 < c) edges.push_back({(i + 1) * k, (i + 1) * k + 1, 0});
      }
      break;
    }
    case Family::kExpanderBarbell: {
      const std::uint32_t c = spec.c, d = spec.d;
      require(c >= 1 && n % c == 0, "expander_barbell needs c dividing n");
      const std::uint32_t k = n / c;
      require(k > d && (static_cast<std::uint64_t>(k) * d) % 2 == 0,
              "expander_barbell needs n/c > d and (n/c)*d even");
      for (std::uint32_t i = 0; i < c; ++i) {
        auto part = random_regular_edges(k, d, i * k + 1, rng);
        edges.insert(edges.end(), part.begin(), part.end());
        if (i + 1 < c) edges.push_back({i * k + 1, (i + 1) * k + 1, 0});
      }
      break;
    }
    case Family::kPath:
      require(n >= 1, "path needs n >= 1");
      for (NodeId v = 1; v < n; ++v) edges.push_back({v, v + 1, 0});
      break;
    case Family::kCycle:
      require(n >= 3, "cycle needs n >= 3");
      for (NodeId v = 1; v < n; ++v) edges.push_back({v, v + 1, 0});
      edges.push_back({1, n, 0});
      break;
    case Family::kComplete:
      require(n >= 1, "complete needs n >= 1");
      edges = clique_edges(1, n);
      break;
    case Family::kStar:
      require(n >= 1, "star needs n >= 1");
      for (NodeId v = 2; v <= n; ++v) edges.push_back({1, v, 0});
      break;
    case Family::kRandomRegular:
      require(n > spec.d && spec.d >= 1 &&
                  (static_cast<std::uint64_t>(n) * spec.d) % 2 == 0,
              "random_regular needs n > d and n*d even");
      edges = random_regular_edges(n, spec.d, 1, rng);
      break;
    case Family::kErdosRenyi: {
      require(n >= 1 && spec.p > 0.0 && spec.p <= 1.0, "erdos_renyi needs p in (0,1]");
      bool ok = false;
      for (int attempt = 0; attempt < kGenerateRetries && !ok; ++attempt) {
        edges.clear();
        for (NodeId a = 1; a <= n; ++a)
          for (NodeId b = a + 1; b <= n; ++b)
            if (uniform01(rng) < spec.p) edges.push_back({a, b, 0});
        ok = edges_connected(n, edges, 1);
      }
      if (!ok)
        throw Error(ErrorKind::kDisconnectedSample,
                    "erdos_renyi: no connected sample within retry cap");
      break;
    }
    case Family::kFromFile: {
      Graph g = load_edgelist(spec.path);
      if (!spec.weighted || g.weighted()) return g;
      edges = g.edges();
      assign_weights(g.n(), edges, rng);
      return Graph::from_edges(g.n(), std::move(edges), true, g.id_bound());
    }
  }
  if (spec.weighted) {
    std::sort(edges.begin(), edges.end());
    assign_weights(n, edges, rng);
  }
  return Graph::from_edges(n, std::move(edges), spec.weighted);
}

namespace {

// Compare a/b < c/d for non-negative values with b, d > 0.
bool frac_less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return static_cast<__int128>(a) * d < static_cast<__int128>(c) * b;
}

std::vector<std::uint32_t> adjacency_masks(const Graph& g) {
  std::vector<std::uint32_t> mask(g.n(), 0);
  for (NodeId v = 1; v <= g.n(); ++v)
    for (NodeId u : g.neighbors(v)) mask[v - 1] |= 1u << (u - 1);
  return mask;
}

// Conductance of G[S] for S given as a bitmask.
std::pair<std::int64_t, std::int64_t> induced_conductance(
    const std::vector<std::uint32_t>& adj, std::uint32_t s) {
  const int size = std::popcount(s);
  if (size <= 1) return {1, 1};
  // Connectivity of G[S].
  std::uint32_t seen = s & (~s + 1);
  std::uint32_t frontier = seen;
  while (frontier) {
    std::uint32_t next = 0;
    for (std::uint32_t f = frontier; f; f &= f - 1)
      next |= adj[std::countr_zero(f)] & s;
    frontier = next & ~seen;
    seen |= next;
  }
  if (seen != s) return {0, 1};
  std::int64_t best_num = 1, best_den = 0;
  const std::uint32_t top = 1u << (31 - std::countl_zero(s));
  const std::uint32_t rest = s & ~top;
  for (std::uint32_t u = rest; u; u = (u - 1) & rest) {
    std::int64_t cut = 0, vol_u = 0, vol_w = 0;
    for (std::uint32_t f = s; f; f &= f - 1) {
      const int v = std::countr_zero(f);
      const std::int64_t inside = std::popcount(adj[v] & s);
      if (u >> v & 1) {
        vol_u += inside;
        cut += std::popcount(adj[v] & (s & ~u));
      } else {
        vol_w += inside;
      }
    }
    const std::int64_t den = std::min(vol_u, vol_w);
    if (best_den == 0 || frac_less(cut, den, best_num, best_den)) {
      best_num = cut;
      best_den = den;
    }
  }
  return {best_num, best_den};
}

}  // namespace

Rational conductance_exact(const Graph& g) {
  const std::uint32_t n = g.n();
  if (n > 20) throw Error(ErrorKind::kTooLarge, "conductance_exact needs n <= 20");
  if (n <= 1) return Rational(1);
  if (!g.connected()) return Rational(0);
  const auto adj = adjacency_masks(g);
  std::int64_t total_vol = 0;
  for (NodeId v = 1; v <= n; ++v) total_vol += g.degree(v);
  std::int64_t best_num = 1, best_den = 0;
  // Gray-code walk over subsets of the first n-1 nodes (node n stays in T).
  std::uint32_t s = 0;
  std::int64_t cut = 0, vol = 0;
  const std::uint64_t limit = 1ull << (n - 1);
  for (std::uint64_t i = 1; i < limit; ++i) {
    const int v = std::countr_zero(i);
    const std::int64_t deg = std::popcount(adj[v]);
    const std::int64_t into_s = std::popcount(adj[v] & s);
    if (s >> v & 1) {
      s &= ~(1u << v);
      vol -= deg;
      cut -= deg - 2 * into_s;
    } else {
      s |= 1u << v;
      vol += deg;
      cut += deg - 2 * into_s;
    }
    const std::int64_t den = std::min(vol, total_vol - vol);
    if (best_den == 0 || frac_less(cut, den, best_num, best_den)) {
      best_num = cut;
      best_den = den;
    }
  }
  return Rational(best_num, best_den);
}

Rational weak_conductance_exact(const Graph& g, Rational c) {
  const std::uint32_t n = g.n();
  if (n > 12) throw Error(ErrorKind::kTooLarge, "weak_conductance_exact needs n <= 12");
  if (c < Rational(1)) throw Error(ErrorKind::kInvalidParameters, "c must be >= 1");
  if (n == 0) return Rational(1);
  const auto adj = adjacency_masks(g);
  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> phi(full + 1);
  for (std::uint32_t s = 1; s <= full; ++s) phi[s] = induced_conductance(adj, s);
  Rational best_overall(2);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::int64_t bn = -1, bd = 1;
    for (std::uint32_t s = 1; s <= full; ++s) {
      if (!(s >> v & 1)) continue;
      // |S| >= n / c  <=>  |S| * c >= n
      if (Rational(std::popcount(s)) * c < Rational(n)) continue;
      const auto [num, den] = phi[s];
      if (bn < 0 || frac_less(bn, bd, num, den)) {
        bn = num;
        bd = den;
      }
    }
    const Rational val(bn, bd);
    if (val < best_overall) best_overall = val;
  }
  return best_overall;
}

Rational cut_conductance(const Graph& g, const std::vector<char>& in_s) {
  std::int64_t cut = 0, vol_s = 0, vol_t = 0;
  for (NodeId v = 1; v <= g.n(); ++v) {
    const bool sv = in_s[v] != 0;
    (sv ? vol_s : vol_t) += g.degree(v);
    if (!sv) continue;
    for (NodeId u : g.neighbors(v))
      if (!in_s[u]) ++cut;
  }
  const std::int64_t den = std::min(vol_s, vol_t);
  if (den == 0) throw Error(ErrorKind::kInvalidParameters, "degenerate cut");
  return Rational(cut, den);
}

double clique_conductance(std::uint32_t k) {
  if (k <= 1) return 1.0;
  return static_cast<double>((k + 1) / 2) / static_cast<double>(k - 1);
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source) {
  std::vector<std::uint32_t> dist(g.n() + 1, UINT32_MAX);
  std::vector<NodeId> queue;
  queue.reserve(g.n());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] != UINT32_MAX) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  return dist;
}

std::uint32_t diameter(const Graph& g) {
  std::uint32_t best = 0;
  for (NodeId s = 1; s <= g.n(); ++s) {
    const auto dist = bfs_distances(g, s);
    for (NodeId v = 1; v <= g.n(); ++v) {
      if (dist[v] == UINT32_MAX)
        throw Error(ErrorKind::kDisconnectedInput, "diameter of a disconnected graph");
      best = std::max(best, dist[v]);
    }
  }
  return best;
}

Graph load_edgelist(const std::string& path, std::uint64_t id_bound) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParseError,
                path + ":" + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) fail("missing header");
  std::uint64_t n = 0, m = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra)) fail("header must be 'n m'");
  }
  if (n == 0 || n > UINT32_MAX) fail("node count out of range");
  std::vector<Edge> edges;
  edges.reserve(m);
  int weighted = -1;
  while (edges.size() < m) {
    if (!next_line()) fail("expected " + std::to_string(m) + " edges");
    std::istringstream ls(line);
    std::int64_t u = 0, v = 0;
    if (!(ls >> u >> v)) fail("expected 'u v [w]'");
    std::uint64_t w = 0;
    std::string tok;
    const bool has_w = static_cast<bool>(ls >> tok);
    if (has_w) {
      std::size_t used = 0;
      try {
        w = std::stoull(tok, &used);
      } catch (const std::exception&) {
        fail("bad weight");
      }
      if (used != tok.size() || w == 0) fail("weight must be a positive integer");
      if (ls >> tok) fail("trailing tokens");
    }
    if (weighted < 0) weighted = has_w ? 1 : 0;
    if (weighted != (has_w ? 1 : 0)) fail("weights must be given on all lines or none");
    if (u < 1 || v < 1 || static_cast<std::uint64_t>(u) > n ||
        static_cast<std::uint64_t>(v) > n)
      fail("node ID outside 1..n");
    if (u == v) fail("self-loop");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
  }
  if (next_line()) fail("more edges than the header declares");
  Graph g;
  try {
    g = Graph::from_edges(static_cast<std::uint32_t>(n), std::move(edges), weighted == 1,
                          id_bound);
  } catch (const Error& e) {
    throw Error(ErrorKind::kParseError, path + ": " + e.what());
  }
  if (!g.connected()) throw Error(ErrorKind::kDisconnectedInput, path + " is disconnected");
  return g;
}

void save_edgelist(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << g.n() << ' ' << g.m() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (g.weighted()) out << ' ' << e.w;
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

}  // namespace gossip
