#include "gossip/primitives.hpp"

#include <cmath>

namespace gossip {

std::uint64_t t_rounds(std::uint32_t n, double phi, double alpha) {
  if (!(phi > 0.0)) throw Error(ErrorKind::kInvalidParameters, "conductance hint must be positive");
  const double t = std::ceil(alpha * std::log(std::max<double>(n, 2)) / phi);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(t));
}

std::uint32_t Forest::max_depth() const {
  std::uint32_t best = 0;
  for (NodeId v = 1; v <= n(); ++v)
    if (in_forest(v)) best = std::max(best, depth[v]);
  return best;
}

std::vector<NodeId> Forest::roots() const {
  std::vector<NodeId> out;
  for (NodeId v = 1; v <= n(); ++v)
    if (is_root(v)) out.push_back(v);
  return out;
}

bool forest_acyclic(const Forest& f) {
  const std::uint32_t n = f.n();
  // 0 = unvisited, 1 = on the current walk, 2 = known to reach a root.
  std::vector<char> state(n + 1, 0);
  std::vector<NodeId> walk;
  for (NodeId s = 1; s <= n; ++s) {
    if (state[s] || !f.in_forest(s)) continue;
    walk.clear();
    NodeId v = s;
    while (v != 0 && state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      v = f.parent[v];
    }
    if (v != 0 && state[v] == 1) return false;
    for (NodeId x : walk) state[x] = 2;
  }
  return true;
}

bool forest_consistent(const Graph& g, const Forest& f) {
  if (!forest_acyclic(f)) return false;
  for (NodeId v = 1; v <= f.n(); ++v) {
    if (!f.in_forest(v)) {
      if (f.parent[v] != 0) return false;
      continue;
    }
    const NodeId p = f.parent[v];
    if (p == 0) {
      if (f.depth[v] != 0 || f.root[v] != v) return false;
      continue;
    }
    if (!g.has_edge(v, p) || !f.in_forest(p)) return false;
    if (f.depth[v] != f.depth[p] + 1 || f.root[v] != f.root[p]) return false;
  }
  return true;
}

namespace {

// Push-pull exchange of (rumor, depth) with parent adoption.
struct RumorGossip {
  struct Msg {
    std::uint64_t rumor;
    std::uint32_t depth;
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };
  using Reply = Msg;

  const Graph* g;
  std::uint64_t rumor_bits;
  std::vector<std::uint64_t> rumor;
  std::vector<std::uint32_t> depth;
  std::vector<NodeId> parent;
  // Best offer received this round.
  std::vector<std::uint64_t> off_rumor;
  std::vector<std::uint32_t> off_depth;
  std::vector<NodeId> off_peer;
  std::vector<NodeId> touched;

  explicit RumorGossip(const Graph& graph, std::uint64_t bits)
      : g(&graph),
        rumor_bits(bits),
        rumor(graph.n() + 1, 0),
        depth(graph.n() + 1, 0),
        parent(graph.n() + 1, 0),
        off_rumor(graph.n() + 1, 0),
        off_depth(graph.n() + 1, 0),
        off_peer(graph.n() + 1, 0) {}

  Msg state(NodeId v) const {
    return {rumor[v], depth[v], 1 + (rumor[v] ? rumor_bits + 32 : 0)};
  }
  void offer(NodeId v, NodeId peer, const Msg& m) {
    if (m.rumor == 0) return;
    const std::uint32_t d = m.depth + 1;
    if (off_rumor[v] == 0) touched.push_back(v);
    const bool better =
        off_rumor[v] == 0 || m.rumor > off_rumor[v] ||
        (m.rumor == off_rumor[v] && (d < off_depth[v] || (d == off_depth[v] && peer < off_peer[v])));
    if (better) {
      off_rumor[v] = m.rumor;
      off_depth[v] = d;
      off_peer[v] = peer;
    }
  }

  void choose_contacts(Engine& e, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= g->n(); ++v) {
      const auto nb = g->neighbors(v);
      if (nb.empty()) continue;
      c.emplace_back(v, nb[uniform_below(e.rng(v), nb.size())]);
    }
  }
  Msg payload(NodeId u, NodeId) { return state(u); }
  Reply on_exchange(NodeId w, NodeId u, const Msg& m) {
    offer(w, u, m);
    return state(w);
  }
  void on_reply(NodeId u, NodeId w, const Reply& r) { offer(u, w, r); }
  void local_step(Engine&, std::uint64_t) {
    for (NodeId v : touched) {
      const bool improves = off_rumor[v] > rumor[v] ||
                            (off_rumor[v] == rumor[v] && off_depth[v] < depth[v]);
      if (improves) {
        rumor[v] = off_rumor[v];
        depth[v] = off_depth[v];
        parent[v] = off_peer[v];
      }
      off_rumor[v] = 0;
    }
    touched.clear();
  }
  bool halted() const { return false; }

  void run(Engine& e, std::uint64_t rounds) {
    bool any = false;
    for (NodeId v = 1; v <= g->n(); ++v) any = any || rumor[v] != 0;
    if (!any) {
      std::uint64_t contacts = 0;
      for (NodeId v = 1; v <= g->n(); ++v) contacts += g->degree(v) > 0;
      e.silent(rounds, contacts, 1);
      return;
    }
    e.execute(*this, rounds);
  }
};

std::uint64_t id_bits(const Graph& g) { return bits_for(g.id_bound()); }

}  // namespace

std::vector<std::uint64_t> spread_max_rumor(Engine& e, std::vector<std::uint64_t> rumor,
                                            std::uint64_t rounds) {
  RumorGossip p(e.graph(), 64);
  p.rumor = std::move(rumor);
  p.rumor.resize(e.graph().n() + 1, 0);
  p.run(e, rounds);
  return p.rumor;
}

Forest build_forest(Engine& e, const std::vector<char>& source, std::uint64_t rounds) {
  const Graph& g = e.graph();
  RumorGossip p(g, id_bits(g));
  for (NodeId v = 1; v <= g.n(); ++v)
    if (source[v]) p.rumor[v] = v;
  p.run(e, rounds);
  Forest f(g.n());
  for (NodeId v = 1; v <= g.n(); ++v) {
    f.parent[v] = p.parent[v];
    f.depth[v] = p.depth[v];
    f.root[v] = static_cast<NodeId>(p.rumor[v]);
  }
  return f;
}

namespace {

struct PullWave {
  struct Msg {
    std::uint64_t bits() const { return 1; }
  };
  struct Reply {
    bool has;
    std::uint64_t value;
    std::uint32_t depth;
    NodeId root;
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };

  Forest* f;
  std::vector<std::uint64_t>* value;
  std::vector<char>* served;
  std::uint64_t value_bits;
  std::uint64_t label_bits;
  std::vector<NodeId> waiting;
  std::size_t progress = 0;

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v : waiting) c.emplace_back(v, f->parent[v]);
  }
  Msg payload(NodeId, NodeId) { return {}; }
  Reply on_exchange(NodeId w, NodeId, const Msg&) {
    if (!(*served)[w]) return {false, 0, 0, 0, 1};
    return {true, (*value)[w], f->depth[w], f->root[w], 1 + value_bits + label_bits + 32};
  }
  void on_reply(NodeId u, NodeId, const Reply& r) {
    if (!r.has) return;
    // Applied in local_step so that same-round readers see old state.
    pending.push_back({u, r});
  }
  std::vector<std::pair<NodeId, Reply>> pending;
  void local_step(Engine&, std::uint64_t) {
    for (const auto& [u, r] : pending) {
      (*value)[u] = r.value;
      f->depth[u] = r.depth + 1;
      f->root[u] = r.root;
      (*served)[u] = 1;
    }
    progress = pending.size();
    pending.clear();
    std::erase_if(waiting, [&](NodeId v) { return (*served)[v] != 0; });
  }
  bool halted() const { return waiting.empty(); }
};

}  // namespace

void pull_broadcast(Engine& e, Forest& f, std::vector<std::uint64_t>& value,
                    std::vector<char>& served, std::uint64_t rounds, std::uint64_t value_bits) {
  PullWave w{&f, &value, &served, value_bits, bits_for(e.graph().id_bound()), {}, 0, {}};
  for (NodeId v = 1; v <= f.n(); ++v)
    if (f.in_forest(v) && f.parent[v] != 0 && !served[v]) w.waiting.push_back(v);
  std::uint64_t done = 0;
  while (done < rounds && !w.waiting.empty()) {
    e.step(w);
    ++done;
    if (w.progress == 0) break;  // nothing changed, so nothing ever will
  }
  // Stuck nodes keep pulling for the rest of the window without effect.
  e.silent(rounds - done, w.waiting.size(), 1);
}

std::uint32_t sketch_chunks(const SketchParams& p, std::uint64_t budget_bits) {
  const std::uint64_t rep = p.rep_bits();
  const std::uint64_t per = std::max<std::uint64_t>(1, (budget_bits - 1) / rep);
  return static_cast<std::uint32_t>((p.reps + per - 1) / per);
}

namespace {

struct ChunkedSketchCast {
  struct Msg {
    const Sketch* s;
    std::uint32_t first, last;
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };
  using Reply = detail::Ack;

  const Forest* f;
  std::vector<Sketch>* acc;
  std::vector<std::vector<NodeId>> buckets;
  std::uint32_t tb, chunks, per, reps;
  std::uint64_t rep_bits;
  std::uint64_t t = 0;

  std::uint32_t chunk_of(NodeId v) const {
    return static_cast<std::uint32_t>(t - (tb - f->depth[v]));
  }
  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    // depth d sends chunk j at t = tb - d + j
    const std::int64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(tb) - static_cast<std::int64_t>(t));
    const std::int64_t hi = std::min<std::int64_t>(tb, static_cast<std::int64_t>(tb) - static_cast<std::int64_t>(t) + chunks - 1);
    for (std::int64_t d = lo; d <= hi; ++d)
      for (NodeId v : buckets[d]) c.emplace_back(v, f->parent[v]);
  }
  Msg payload(NodeId u, NodeId) {
    const std::uint32_t j = chunk_of(u);
    const std::uint32_t first = j * per, last = std::min(reps, first + per);
    return {&(*acc)[u], first, last, 1 + (last - first) * rep_bits};
  }
  Reply on_exchange(NodeId w, NodeId, const Msg& m) {
    (*acc)[w].merge_reps(*m.s, m.first, m.last);
    return {};
  }
  void on_reply(NodeId, NodeId, const Reply&) {}
  void local_step(Engine&, std::uint64_t) { ++t; }
  bool halted() const { return false; }
};

}  // namespace

EdgeSample sample_outgoing_edge(Engine& e, const Forest& f, const EdgeKeep& keep,
                                std::uint32_t depth_bound, std::uint32_t reps,
                                const std::vector<char>* active_root, std::uint64_t tag) {
  const Graph& g = e.graph();
  const std::uint32_t n = g.n();
  const std::uint64_t start = e.round();
  auto active = [&](NodeId v) {
    return f.in_forest(v) && (!active_root || (*active_root)[f.root[v]]);
  };

  // 1. Roots draw and broadcast fresh shared randomness.
  std::vector<std::optional<std::uint64_t>> seed(n + 1);
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v) && active(v)) seed[v] = e.rng(v)();
  broadcast(e, f, seed, depth_bound, [](std::uint64_t) { return 64; }, active_root);

  // 2. Local sketches, then the chunked pipelined convergecast.
  SketchParams base{0, g.id_bound(), reps};
  const std::uint32_t chunks = sketch_chunks(base, e.budget_bits());
  std::vector<Sketch> acc(n + 1);
  ChunkedSketchCast cast{&f, &acc, detail::depth_buckets(f, depth_bound, active_root), depth_bound,
                         chunks, 0, reps, base.rep_bits()};
  cast.per = (reps + chunks - 1) / chunks;
  std::uint32_t deepest = 0;
  for (NodeId v = 1; v <= n; ++v) {
    if (!active(v) || !seed[v]) continue;
    SketchParams p = base;
    p.seed = *seed[v];
    acc[v] = node_sketch(v, g.neighbors(v), keep, p, tag);
    if (f.depth[v] <= depth_bound) deepest = std::max(deepest, f.depth[v]);
  }
  // Rounds before the deepest node's first chunk are empty.
  const std::uint64_t total = depth_bound + chunks;
  const std::uint64_t skip = depth_bound - deepest;
  e.idle(skip);
  cast.t = skip;
  e.execute(cast, total - skip);

  // 3. Roots sample and broadcast the result.
  std::vector<std::optional<std::pair<NodeId, NodeId>>> result(n + 1);
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v) && active(v) && !acc[v].empty_shape()) result[v] = acc[v].sample();
  std::vector<std::optional<std::optional<std::pair<NodeId, NodeId>>>> carry(n + 1);
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v) && active(v)) carry[v] = result[v];
  const std::uint64_t eb = 2 * bits_for(g.id_bound()) + 1;
  broadcast(e, f, carry, depth_bound,
            [eb](const std::optional<std::pair<NodeId, NodeId>>&) { return eb; }, active_root);

  EdgeSample out;
  out.edge.assign(n + 1, std::nullopt);
  for (NodeId v = 1; v <= n; ++v)
    if (carry[v]) out.edge[v] = *carry[v];
  out.rounds = e.round() - start;
  out.chunks = chunks;
  return out;
}

}  // namespace gossip
