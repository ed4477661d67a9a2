#include "gossip/weakcond.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace gossip {

SetupState make_setup_state(std::uint32_t n) { return {std::vector<char>(n + 1, 0), Forest(n)}; }

void setup_phase(Engine& e, SetupState& s, std::uint64_t t) {
  const std::uint32_t n = e.graph().n();
  const std::uint64_t start = e.round();

  // 1. Forest F' grown from the uncovered nodes; every node gossips.
  std::vector<char> src(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) src[v] = !s.covered[v];
  Forest fp = build_forest(e, src, 2 * t);

  // 2. F' roots spread their IDs; a root that sees a higher one goes inactive.
  std::vector<std::uint64_t> ids(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (fp.is_root(v)) ids[v] = v;
  const auto seen = spread_max_rumor(e, ids, 2 * t);

  // 3. Partial broadcast from the active roots down to depth 2T.
  std::vector<std::uint64_t> value(n + 1, 0);
  std::vector<char> served(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (ids[v] != 0 && seen[v] == v) served[v] = 1;
  pull_broadcast(e, fp, value, served, 2 * t, 1);

  // 4. Merge F'' into F; a node with two parents keeps the shallower one.
  for (NodeId v = 1; v <= n; ++v) {
    if (!served[v]) continue;
    if (!s.covered[v]) {
      s.covered[v] = 1;
      s.forest.parent[v] = fp.parent[v];
      s.forest.depth[v] = fp.parent[v] ? fp.depth[v] : 0;
      s.forest.root[v] = fp.parent[v] ? fp.root[v] : v;
    } else if (fp.parent[v] != 0 && fp.depth[v] < s.forest.depth[v]) {
      s.forest.parent[v] = fp.parent[v];
      s.forest.depth[v] = fp.depth[v];
      s.forest.root[v] = fp.root[v];
    }
  }
  if (e.round() - start != 6 * t)
    throw Error(ErrorKind::kPhaseOverrun, "set-up phase used " +
                                              std::to_string(e.round() - start) + " rounds");
}

SetupResult setup(Engine& e, double c, double phi, double alpha) {
  if (!(c >= 1.0)) throw Error(ErrorKind::kInvalidParameters, "c must be >= 1");
  const std::uint32_t n = e.graph().n();
  const std::uint64_t t = t_rounds(n, phi, alpha);
  const auto cstar = static_cast<std::uint32_t>(std::floor(c));
  SetupState s = make_setup_state(n);
  for (std::uint32_t i = 1; i <= cstar; ++i) {
    e.mark("setup-phase-" + std::to_string(i));
    setup_phase(e, s, t);
  }
  // Merges leave depth and root labels stale below a switched node; one
  // pull broadcast from the roots makes them exact again.
  std::vector<std::uint64_t> value(n + 1, 0);
  std::vector<char> served(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (s.forest.is_root(v)) served[v] = 1;
  pull_broadcast(e, s.forest, value, served, 2 * t, 1);

  SetupResult out;
  out.covered_all = true;
  for (NodeId v = 1; v <= n; ++v) {
    if (s.covered[v] && (served[v] || s.forest.is_root(v))) continue;
    if (!s.covered[v]) out.covered_all = false;
    s.forest.make_root(v);
  }
  out.clusters = std::move(s.forest);
  out.roots = static_cast<std::uint32_t>(out.clusters.roots().size());
  out.max_depth = out.clusters.max_depth();
  return out;
}

SuperClusters SuperClusters::from_forest(const Forest& trees, std::uint32_t tb) {
  SuperClusters sc;
  sc.trees = trees;
  sc.resp.assign(trees.n() + 1, 0);
  sc.tb = tb;
  return sc;
}

void SuperClusters::assign(NodeId v, NodeId u) {
  if (resp[v] != 0)
    throw Error(ErrorKind::kResponsibilityViolation,
                "node " + std::to_string(v) + " already drives an inter-cluster edge");
  resp[v] = u;
}

std::vector<NodeId> super_cluster_of_root(const SuperClusters& sc) {
  const std::uint32_t n = sc.trees.n();
  std::vector<NodeId> up(n + 1);
  std::iota(up.begin(), up.end(), 0);
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (NodeId v = 1; v <= n; ++v) {
    if (!sc.resp[v]) continue;
    NodeId a = find(sc.trees.root[v]), b = find(sc.trees.root[sc.resp[v]]);
    if (a != b) up[std::max(a, b)] = std::min(a, b);
  }
  std::vector<NodeId> label(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (sc.trees.is_root(v)) label[v] = find(v);
  return label;
}

namespace {

// One round in which every responsible node contacts the other endpoint of
// its edge; both sides hand the payload of out() to recv().
template <class M>
struct ExchangeRound {
  struct Msg {
    std::optional<M> m;
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };
  using Reply = Msg;

  const SuperClusters* sc;
  std::function<Msg(NodeId)> out;
  std::function<void(NodeId, NodeId, const M&)> recv;
  const std::vector<char>* active_root = nullptr;

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v < sc->resp.size(); ++v) {
      if (!sc->resp[v]) continue;
      if (active_root && !(*active_root)[sc->trees.root[v]]) continue;
      c.emplace_back(v, sc->resp[v]);
    }
  }
  Msg payload(NodeId u, NodeId) { return out(u); }
  Reply on_exchange(NodeId w, NodeId u, const Msg& m) {
    Msg r = out(w);
    if (m.m) recv(w, u, *m.m);
    return r;
  }
  void on_reply(NodeId u, NodeId w, const Reply& r) {
    if (r.m) recv(u, w, *r.m);
  }
  void local_step(Engine&, std::uint64_t) {}
  bool halted() const { return false; }
};

std::uint64_t id_bits(const Engine& e) { return bits_for(e.graph().id_bound()); }

}  // namespace

std::vector<std::uint64_t> flood(Engine& e, const SuperClusters& sc, std::uint32_t iterations,
                                 std::vector<std::uint64_t> root_value, FloodOp op,
                                 std::uint64_t value_bits) {
  const std::uint32_t n = sc.trees.n();
  const std::uint64_t identity = op == FloodOp::kMax ? 0 : UINT64_MAX;
  auto combine = [op](std::uint64_t a, std::uint64_t b) {
    return op == FloodOp::kMax ? std::max(a, b) : std::min(a, b);
  };
  auto bits = [value_bits](std::uint64_t) { return value_bits; };
  for (std::uint32_t it = 0; it < iterations; ++it) {
    std::vector<std::optional<std::uint64_t>> node_value(n + 1);
    for (NodeId v = 1; v <= n; ++v)
      if (sc.trees.is_root(v)) node_value[v] = root_value[v];
    broadcast(e, sc.trees, node_value, sc.tb, bits);

    std::vector<std::uint64_t> acc(n + 1, identity);
    ExchangeRound<std::uint64_t> ex{&sc, nullptr, nullptr};
    ex.out = [&](NodeId v) -> ExchangeRound<std::uint64_t>::Msg {
      if (!node_value[v]) return {std::nullopt, 1};
      return {node_value[v], 1 + value_bits};
    };
    ex.recv = [&](NodeId self, NodeId, const std::uint64_t& m) { acc[self] = combine(acc[self], m); };
    e.step(ex);

    convergecast(
        e, sc.trees, acc, sc.tb, [&](std::uint64_t& a, std::uint64_t b) { a = combine(a, b); },
        bits);
    for (NodeId v = 1; v <= n; ++v)
      if (sc.trees.is_root(v)) root_value[v] = combine(root_value[v], acc[v]);
  }
  return root_value;
}

std::vector<char> eccentricity_at_most(Engine& e, const SuperClusters& sc, std::uint32_t beta) {
  const std::uint32_t n = sc.trees.n();
  const std::uint64_t ib = id_bits(e);
  std::vector<std::uint64_t> ids(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (sc.trees.is_root(v)) ids[v] = v;
  const auto at_beta = flood(e, sc, beta, ids, FloodOp::kMax, ib);
  const auto last = flood(e, sc, 1, at_beta, FloodOp::kMax, ib);
  std::vector<std::uint64_t> changed(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (sc.trees.is_root(v)) changed[v] = last[v] != at_beta[v];
  // A change at distance beta + 1 from the max cluster needs beta + 1
  // iterations to reach it.
  const auto any = flood(e, sc, beta + 1, changed, FloodOp::kMax, 1);
  std::vector<char> out(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (sc.trees.is_root(v)) out[v] = last[v] == v && any[v] == 0;
  return out;
}

std::uint32_t reoriented_depth_bound(std::uint32_t tb, std::uint32_t beta) {
  return tb + beta * (2 * tb + 1);
}

namespace {

struct Cand {
  std::uint32_t nd = UINT32_MAX;  // new depth of the entry node
  NodeId u = 0;                   // entry node
  NodeId w = 0;                   // its new parent across the inter-cluster edge
  std::uint32_t dold = 0;         // entry node's old depth
  NodeId center = 0;              // root of the arriving wave
};

bool better(const Cand& a, const Cand& b) {
  if (a.nd != b.nd) return a.nd < b.nd;
  if (a.u != b.u) return a.u < b.u;
  return a.w < b.w;
}

struct WaveHeader {
  Cand win;
  NodeId center = 0;
  std::uint32_t nd = 0;  // sender's new depth
};

struct CandAcc {
  Cand c;
  NodeId self = 0;
};

}  // namespace

Reoriented reorient(Engine& e, const SuperClusters& sc, std::uint32_t beta,
                    const std::vector<char>* centers_in) {
  const std::uint32_t n = sc.trees.n();
  const Forest& f = sc.trees;
  const std::uint32_t tb = sc.tb;
  const std::uint64_t ib = id_bits(e);

  std::vector<char> center(n + 1, 0);
  if (centers_in) {
    center = *centers_in;
  } else {
    std::vector<std::uint64_t> ids(n + 1, 0);
    for (NodeId v = 1; v <= n; ++v)
      if (f.is_root(v)) ids[v] = v;
    const auto mx = flood(e, sc, beta, ids, FloodOp::kMax, ib);
    for (NodeId v = 1; v <= n; ++v)
      if (f.is_root(v)) center[v] = mx[v] == v;
  }
  bool any_center = false;
  for (NodeId v = 1; v <= n; ++v) any_center = any_center || (f.is_root(v) && center[v]);
  if (!any_center)
    throw Error(ErrorKind::kPreconditionUnverified, "reorient needs a verified center cluster");

  Reoriented out;
  out.tree = f;
  out.centers.assign(n + 1, 0);
  out.depth_bound = reoriented_depth_bound(tb, beta);

  std::vector<char> ready(n + 1, 0);
  std::vector<std::uint32_t> nd(n + 1, 0);
  std::vector<Cand> best(n + 1);
  std::vector<NodeId> via(n + 1, 0);
  std::vector<char> status(n + 1, 0);  // at roots: 0 unreached, 1 pending, 2 done
  std::vector<WaveHeader> win(n + 1);  // at pending roots
  for (NodeId v = 1; v <= n; ++v) {
    if (!f.is_root(v) || !center[v]) continue;
    status[v] = 1;
    best[v] = {0, v, 0, 0, v};
    win[v] = {best[v], v, 0};
    out.centers[v] = 1;
  }

  auto apply = [&](NodeId u, const WaveHeader& h) {
    std::uint32_t d;
    NodeId p;
    if (best[u].u == h.win.u && h.win.u != 0) {
      d = h.win.nd + h.win.dold - f.depth[u];
      p = u == h.win.u ? h.win.w : via[u];
    } else {
      d = h.nd + 1;
      p = f.parent[u];
    }
    ready[u] = 1;
    nd[u] = d;
    out.tree.parent[u] = p;
    out.tree.depth[u] = d;
    out.tree.root[u] = h.center;
    return WaveHeader{h.win, h.center, d};
  };
  const std::uint64_t header_bits = 4 * ib + 64;
  auto wave_bits = [header_bits](const WaveHeader&) { return header_bits; };

  auto run_broadcast = [&] {
    std::vector<char> pending(n + 1, 0);
    std::vector<std::optional<WaveHeader>> hv(n + 1);
    for (NodeId v = 1; v <= n; ++v) {
      if (!f.is_root(v) || status[v] != 1) continue;
      pending[v] = 1;
      hv[v] = apply(v, win[v]);
      status[v] = 2;
    }
    broadcast_map(e, f, hv, tb, wave_bits, apply, &pending);
  };

  struct Arrival {
    NodeId center;
    std::uint32_t nd;
  };
  for (std::uint32_t it = 0; it < beta; ++it) {
    run_broadcast();

    ExchangeRound<Arrival> ex{&sc, nullptr, nullptr};
    ex.out = [&](NodeId v) -> ExchangeRound<Arrival>::Msg {
      if (!ready[v]) return {std::nullopt, 1};
      return {Arrival{out.tree.root[v], nd[v]}, 1 + ib + 32};
    };
    ex.recv = [&](NodeId self, NodeId from, const Arrival& m) {
      if (ready[self]) return;
      const Cand c{m.nd + 1, self, from, f.depth[self], m.center};
      if (better(c, best[self])) {
        best[self] = c;
        via[self] = 0;
      }
    };
    e.step(ex);

    std::vector<char> open(n + 1, 0);
    for (NodeId v = 1; v <= n; ++v)
      if (f.is_root(v)) open[v] = status[v] == 0;
    std::vector<CandAcc> acc(n + 1);
    for (NodeId v = 1; v <= n; ++v) acc[v] = {best[v], v};
    convergecast(
        e, f, acc, tb,
        [&](CandAcc& a, const CandAcc& in) {
          if (better(in.c, a.c)) {
            a.c = in.c;
            via[a.self] = in.self;
          }
        },
        [header_bits](const CandAcc&) { return header_bits; }, &open);
    for (NodeId v = 1; v <= n; ++v) {
      if (!f.in_forest(v) || !open[f.root[v]]) continue;
      best[v] = acc[v].c;
    }
    for (NodeId v = 1; v <= n; ++v) {
      if (!f.is_root(v) || status[v] != 0 || best[v].nd == UINT32_MAX) continue;
      status[v] = 1;
      win[v] = {best[v], best[v].center, 0};
    }
  }
  run_broadcast();

  const auto label = super_cluster_of_root(sc);
  std::vector<char> chosen(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v) && center[v]) chosen[label[v]] = 1;
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v) && chosen[label[v]] && status[v] != 2) out.complete = false;
  return out;
}

std::uint64_t weakcond_round_cap(std::uint32_t n, const WeakCondConfig& cfg,
                                 std::uint64_t budget_bits, std::uint64_t id_bound) {
  const std::uint64_t t = t_rounds(n, cfg.phi, cfg.alpha);
  const std::uint64_t tb = 2 * t;
  const auto cstar = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(cfg.c)));
  const std::uint64_t iter = 2 * tb + 1;
  const std::uint32_t reps = cfg.reps ? cfg.reps : reps_for_nodes(n);
  const std::uint64_t chunks = sketch_chunks(SketchParams{0, id_bound, reps}, budget_bits);
  std::uint64_t total = cstar * 6 * t + 2 * t;
  const std::uint32_t phases = ceil_log2(cstar);
  for (std::uint32_t i = 1; i <= phases; ++i) {
    const std::uint64_t beta = 1ULL << i;
    const std::uint64_t br = tb + beta * iter;
    const std::uint64_t phase = (2 * beta + 2) * iter + beta * iter + tb + 3 * br + chunks + 1;
    total += (cfg.stall_retries + 1) * phase;
  }
  const std::uint64_t br = tb + cstar * iter;
  total += 2 * cstar * iter + tb + 2 * br;
  return total + 1000;
}

namespace {

// Landing round: the inside endpoint of each sampled edge contacts the
// other endpoint, which takes responsibility if it is free; otherwise the
// sampler's endpoint takes it if free; otherwise the edge is dropped.
struct Landing {
  struct Msg {
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };
  struct Reply {
    bool accepted;
    std::uint64_t bits() const { return 1; }
  };
  SuperClusters* sc;
  std::vector<std::pair<NodeId, NodeId>> landers;
  std::uint64_t edge_bits;
  std::uint32_t dropped = 0;

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (auto& l : landers) c.push_back(l);
  }
  Msg payload(NodeId, NodeId) { return {edge_bits}; }
  Reply on_exchange(NodeId w, NodeId u, const Msg&) {
    if (sc->resp[w] != 0) return {false};
    sc->assign(w, u);
    return {true};
  }
  void on_reply(NodeId u, NodeId w, const Reply& r) {
    if (r.accepted) return;
    if (sc->resp[u] == 0)
      sc->assign(u, w);
    else
      ++dropped;
  }
  void local_step(Engine&, std::uint64_t) {}
  bool halted() const { return false; }
};

}  // namespace

namespace {

// source == 0 elects a leader instead: the final tree's root broadcasts its
// own ID and the final tree is the output tree.
WeakCondResult weakcond_impl(const Graph& g, NodeId source, const WeakCondConfig& cfg,
                             std::uint64_t seed) {
  const std::uint32_t n = g.n();
  if (!(cfg.c >= 1.0)) throw Error(ErrorKind::kInvalidParameters, "c must be >= 1");
  const std::uint64_t t = t_rounds(n, cfg.phi, cfg.alpha);
  const auto tb = static_cast<std::uint32_t>(2 * t);
  const auto cstar = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(cfg.c)));
  const std::uint32_t reps = cfg.reps ? cfg.reps : reps_for_nodes(n);
  const std::uint64_t budget_bits = cfg.budget.max_bits(g.id_bound());
  const std::uint64_t cap =
      cfg.max_rounds ? cfg.max_rounds : weakcond_round_cap(n, cfg, budget_bits, g.id_bound());
  Engine e(g, cfg.budget, cap, seed);
  const std::uint64_t ib = bits_for(g.id_bound());

  WeakCondResult res;
  res.stats.t = t;
  SetupResult su = setup(e, cfg.c, cfg.phi, cfg.alpha);
  res.stats.setup_roots = su.roots;
  res.stats.setup_max_depth = su.max_depth;
  res.stats.setup_covered = su.covered_all;
  res.clusters = su.clusters;

  SuperClusters sc = SuperClusters::from_forest(su.clusters, tb);
  const std::uint32_t k = su.roots;
  const std::uint32_t phases = ceil_log2(cstar);
  res.stats.merge_phases = phases;

  for (std::uint32_t i = 1; i <= phases; ++i) {
    const std::uint32_t beta = 1u << i;
    const std::uint32_t want = std::min<std::uint32_t>(beta, k);
    for (std::uint32_t attempt = 0;; ++attempt) {
      e.mark("merge-phase-" + std::to_string(i) +
             (attempt ? "-retry-" + std::to_string(attempt) : std::string()));
      const auto before = super_cluster_of_root(sc);
      const auto ecc = eccentricity_at_most(e, sc, beta);
      bool any = false;
      for (NodeId v = 1; v <= n; ++v) any = any || ecc[v];
      if (any) {
        const Reoriented re = reorient(e, sc, beta, &ecc);
        const EdgeSample smp =
            sample_outgoing_edge(e, re.tree, {}, re.depth_bound, reps, &re.centers, 0);
        Landing land{&sc, {}, 1 + 2 * ib};
        for (NodeId x = 1; x <= n; ++x) {
          if (!re.centers[x] || !smp.edge[x]) continue;
          auto [a, b] = *smp.edge[x];
          const bool a_in = re.tree.root[a] == x, b_in = re.tree.root[b] == x;
          if (a_in == b_in ||
              before[sc.trees.root[a]] == before[sc.trees.root[b]]) {
            ++res.stats.soundness_violations;
            continue;
          }
          land.landers.emplace_back(a_in ? a : b, a_in ? b : a);
        }
        std::sort(land.landers.begin(), land.landers.end());
        e.step(land);
      } else {
        // Nobody is eligible; the phase still runs to its scheduled length.
        const std::uint32_t br = reoriented_depth_bound(tb, beta);
        e.idle(static_cast<std::uint64_t>(beta) * (2 * tb + 1) + tb + 3 * br +
               sketch_chunks(SketchParams{0, g.id_bound(), reps}, budget_bits) + 1);
      }
      // Invariant: every super cluster holds at least min(2^i, k) clusters.
      const auto label = super_cluster_of_root(sc);
      std::vector<std::uint32_t> size(n + 1, 0);
      for (NodeId v = 1; v <= n; ++v)
        if (sc.trees.is_root(v)) ++size[label[v]];
      std::uint32_t smallest = UINT32_MAX;
      for (NodeId v = 1; v <= n; ++v)
        if (size[v]) smallest = std::min(smallest, size[v]);
      if (smallest >= want) {
        res.stats.min_cluster_count.push_back(smallest);
        break;
      }
      if (attempt >= cfg.stall_retries) {
        ++res.stats.invariant_violations;
        throw Error(ErrorKind::kMergeStall,
                    "merge phase " + std::to_string(i) + " left a super cluster of " +
                        std::to_string(smallest) + " clusters after " +
                        std::to_string(attempt + 1) + " attempts");
      }
      ++res.stats.retries;
    }
  }

  // Final tree over the single super cluster, then the rumor goes up to the
  // root and back down.
  e.mark("final");
  const Reoriented fin = reorient(e, sc, cstar, nullptr);
  if (source == 0) {
    std::vector<std::optional<std::uint64_t>> id(n + 1);
    for (NodeId v = 1; v <= n; ++v)
      if (fin.tree.is_root(v)) id[v] = v;
    broadcast(e, fin.tree, id, fin.depth_bound, [ib](std::uint64_t) { return ib; });
    res.rumor.assign(n + 1, 0);
    for (NodeId v = 1; v <= n; ++v) res.rumor[v] = id[v].value_or(0);
    res.tree = fin.tree;
    res.trace = e.trace();
    res.trace.outputs = res.rumor;
    return res;
  }
  struct RumorAcc {
    std::uint64_t rumor = 0;
    NodeId self = 0;
  };
  std::vector<NodeId> first_from(n + 1, 0);
  std::vector<char> informed(n + 1, 0);
  std::vector<RumorAcc> acc(n + 1);
  for (NodeId v = 1; v <= n; ++v) acc[v] = {v == source ? cfg.rumor : 0, v};
  informed[source] = 1;
  convergecast(
      e, fin.tree, acc, fin.depth_bound,
      [&](RumorAcc& a, const RumorAcc& in) {
        if (a.rumor == 0 && in.rumor != 0) {
          a.rumor = in.rumor;
          informed[a.self] = 1;
          first_from[a.self] = in.self;
        }
      },
      [](const RumorAcc&) { return 65; });
  std::vector<std::optional<std::uint64_t>> down(n + 1);
  for (NodeId v = 1; v <= n; ++v)
    if (fin.tree.is_root(v) && acc[v].rumor) down[v] = acc[v].rumor;
  broadcast_map(
      e, fin.tree, down, fin.depth_bound, [](std::uint64_t) { return 64; },
      [&](NodeId u, const std::uint64_t& r) {
        if (!informed[u]) {
          informed[u] = 1;
          first_from[u] = fin.tree.parent[u];
        }
        return r;
      });

  res.rumor.assign(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) {
    if (informed[v]) res.rumor[v] = cfg.rumor;
  }
  res.tree = Forest(n);
  // Depths along first-receipt parents, rooted at the source.
  std::vector<std::uint32_t> depth(n + 1, UINT32_MAX);
  depth[source] = 0;
  std::function<std::uint32_t(NodeId)> resolve = [&](NodeId v) -> std::uint32_t {
    std::vector<NodeId> chain;
    while (depth[v] == UINT32_MAX && informed[v] && first_from[v] != 0) {
      chain.push_back(v);
      v = first_from[v];
    }
    std::uint32_t d = depth[v];
    if (d == UINT32_MAX) return d;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth[*it] = ++d;
    return d;
  };
  for (NodeId v = 1; v <= n; ++v) {
    if (!informed[v]) continue;
    const std::uint32_t d = resolve(v);
    if (d == UINT32_MAX) continue;
    res.tree.parent[v] = v == source ? 0 : first_from[v];
    res.tree.depth[v] = d;
    res.tree.root[v] = source;
  }
  res.trace = e.trace();
  res.trace.outputs = res.rumor;
  return res;
}

}  // namespace

WeakCondResult rumor_spread_weakcond(const Graph& g, NodeId source, const WeakCondConfig& cfg,
                                     std::uint64_t seed) {
  if (source == 0 || source > g.n()) throw Error(ErrorKind::kIdOutOfRange, "source outside 1..n");
  return weakcond_impl(g, source, cfg, seed);
}

WeakCondResult elect_leader_weakcond(const Graph& g, const WeakCondConfig& cfg, std::uint64_t seed) {
  return weakcond_impl(g, 0, cfg, seed);
}

}  // namespace gossip
