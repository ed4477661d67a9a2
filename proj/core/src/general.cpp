#include "gossip/general.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace gossip {

GeneralSchedule general_schedule(std::uint32_t n, const GeneralConfig& cfg) {
  if (!(cfg.delta_exp >= 0.0 && cfg.delta_exp <= 1.0))
    throw Error(ErrorKind::kInvalidParameters, "delta_exp must lie in [0, 1]");
  if (!(cfg.beta_mpx > 0.0)) throw Error(ErrorKind::kInvalidParameters, "beta_mpx must be > 0");
  const double nd = std::max<double>(n, 2);
  const double ln = std::log(nd), lg = std::log2(nd);
  const double up = std::pow(nd, cfg.delta_exp), down = std::pow(nd, 1.0 - cfg.delta_exp);
  GeneralSchedule s;
  s.threshold = static_cast<std::uint32_t>(std::ceil(cfg.threshold_c * up * ln));
  s.discovery = static_cast<std::uint32_t>(std::ceil(cfg.discovery_c * up * ln));
  s.kappa = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(cfg.c_kappa * down * lg)));
  s.merge_phases = static_cast<std::uint32_t>(std::ceil(cfg.c_merge * lg));
  s.kept_bound = std::max<std::uint32_t>(2, static_cast<std::uint32_t>(std::ceil(cfg.c_nbr * lg)));
  s.shift_cap = 4.0 / cfg.beta_mpx * ln;
  s.mpx_rounds = static_cast<std::uint32_t>(std::ceil(s.shift_cap)) + 1;
  s.merge_reps = reps_for_failure(cfg.delta_sk);
  s.check_reps = reps_for_failure(1.0 / (nd * nd * nd));
  return s;
}

// ---- MPX ----

Forest MpxClustering::forest() const {
  Forest f(static_cast<std::uint32_t>(root.size() - 1));
  f.parent = parent;
  f.depth = depth;
  f.root = root;
  return f;
}

std::uint32_t MpxClustering::clusters() const {
  std::uint32_t k = 0;
  for (NodeId v = 1; v < root.size(); ++v) k += root[v] == v;
  return k;
}

std::vector<double> mpx_shifts(Engine& e, double beta, double cap) {
  const std::uint32_t n = e.graph().n();
  std::vector<double> s(n + 1, 0.0);
  for (NodeId v = 1; v <= n; ++v) {
    do {
      s[v] = -std::log1p(-uniform01(e.rng(v))) / beta;
    } while (s[v] > cap);
  }
  return s;
}

MpxProtocol::MpxProtocol(const ArcGraph& h, std::vector<double> shifts, std::uint64_t id_bits)
    : h_(&h),
      shift_(std::move(shifts)),
      val_(shift_),
      root_(h.n() + 1),
      parent_(h.n() + 1, 0),
      hops_(h.n() + 1, 0),
      changed_(h.n() + 1, 1),
      id_bits_(id_bits) {
  std::iota(root_.begin(), root_.end(), 0);
}

void MpxProtocol::fill(std::vector<MaybeMsg>& out) const {
  out.assign(h_->arcs(), std::nullopt);
  const auto bits = static_cast<std::uint32_t>(64 + id_bits_ + 32);
  for (NodeId v = 1; v <= h_->n(); ++v) {
    if (!changed_[v]) continue;
    const CongestMsg m{{std::bit_cast<std::uint64_t>(val_[v]), root_[v], hops_[v]}, bits};
    for (std::size_t a = h_->begin(v); a < h_->end(v); ++a) out[a] = m;
  }
}

void MpxProtocol::consume(const std::vector<MaybeMsg>& in) {
  std::fill(changed_.begin(), changed_.end(), 0);
  for (NodeId v = 1; v <= h_->n(); ++v) {
    for (std::size_t a = h_->begin(v); a < h_->end(v); ++a) {
      if (!in[a]) continue;
      const double cand = std::bit_cast<double>(in[a]->w[0]) - 1.0;
      const auto r = static_cast<NodeId>(in[a]->w[1]);
      if (cand > val_[v] || (cand == val_[v] && r < root_[v])) {
        val_[v] = cand;
        root_[v] = r;
        parent_[v] = h_->head(a);
        hops_[v] = static_cast<std::uint32_t>(in[a]->w[2]) + 1;
        changed_[v] = 1;
      }
    }
  }
}

MpxClustering MpxProtocol::result(std::uint32_t rounds) const {
  MpxClustering c;
  c.root = root_;
  c.parent = parent_;
  c.depth = hops_;
  c.shift = shift_;
  c.rounds = rounds;
  c.root[0] = 0;
  return c;
}

MpxClustering mpx_decompose(Engine& e, const ArcGraph& h, const std::vector<char>& cover,
                            std::uint32_t delta_th, double beta_mpx, std::vector<double> shifts,
                            std::uint32_t rounds) {
  const double cap = 4.0 / beta_mpx * std::log(std::max<double>(h.n(), 2));
  if (shifts.empty()) shifts = mpx_shifts(e, beta_mpx, cap);
  if (rounds == 0) rounds = static_cast<std::uint32_t>(std::ceil(cap)) + 1;
  MpxProtocol p(h, std::move(shifts), bits_for(e.graph().id_bound()));
  const CongestSimulator sim(e.graph(), h, cover_owned_arcs(h, cover, delta_th), delta_th);
  std::vector<MaybeMsg> out, in;
  for (std::uint32_t r = 0; r < rounds; ++r) {
    p.fill(out);
    sim.run(e, out, in);
    p.consume(in);
  }
  return p.result(rounds);
}

// ---- sparse subgraph ----

std::vector<std::pair<NodeId, NodeId>> SparseSubgraph::e_hbar_prime() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId v = 1; v <= n; ++v)
    if (forest.in_forest(v) && forest.parent[v])
      out.emplace_back(std::min(v, forest.parent[v]), std::max(v, forest.parent[v]));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<NodeId, NodeId>> SparseSubgraph::e_l_prime() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (auto [a, b] : el_prime) out.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t SparseSubgraph::max_kept() const {
  std::vector<std::uint32_t> k(n + 1, 0);
  std::uint32_t best = 0;
  for (auto [a, b] : el_prime) best = std::max(best, ++k[a]);
  return best;
}

std::vector<std::pair<NodeId, NodeId>> e_hbar(const Graph& g, const SparseSubgraph& s) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& ed : g.edges())
    if (s.hbar[ed.u] && s.hbar[ed.v]) out.emplace_back(ed.u, ed.v);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> e_l(const Graph& g, const SparseSubgraph& s) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& ed : g.edges())
    if (!(s.hbar[ed.u] && s.hbar[ed.v])) out.emplace_back(ed.u, ed.v);
  return out;
}

namespace {

struct Flags {
  std::uint8_t f;
  std::uint64_t bits() const { return 2; }
};

// Sampling-phase contacts: low nodes walk their neighbor list, high
// non-star nodes call uniform random neighbors and remember star replies.
struct Discovery {
  using Msg = Flags;
  using Reply = Flags;
  const Graph* g;
  const SparseSubgraph* s;
  Engine* e;
  std::vector<NodeId>* star_seen;
  std::uint32_t t = 0;

  std::uint8_t flags(NodeId v) const { return (s->star[v] ? 1 : 0) | (s->low[v] ? 2 : 0); }
  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= g->n(); ++v) {
      const auto nb = g->neighbors(v);
      if (s->low[v]) {
        if (t < nb.size()) c.emplace_back(v, nb[t]);
      } else if (!s->star[v] && !nb.empty()) {
        c.emplace_back(v, nb[uniform_below(e->rng(v), nb.size())]);
      }
    }
  }
  Msg payload(NodeId u, NodeId) { return {flags(u)}; }
  Reply on_exchange(NodeId w, NodeId, const Msg&) { return {flags(w)}; }
  void on_reply(NodeId u, NodeId w, const Reply& r) {
    if ((r.f & 1) && !s->low[u] && !s->star[u]) {
      NodeId& best = (*star_seen)[u];
      if (best == 0 || w < best) best = w;
    }
  }
  void local_step(Engine&, std::uint64_t) { ++t; }
  bool halted() const { return false; }
};

struct Landing {
  struct Msg {
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };
  struct Reply {
    bool heads;
    std::uint64_t bits() const { return 1; }
  };
  const std::vector<char>* heads;  // by node: its cluster chose heads
  std::vector<std::pair<NodeId, NodeId>> contacts;
  std::vector<NodeId>* attach;
  std::uint64_t b;

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    c.insert(c.end(), contacts.begin(), contacts.end());
  }
  Msg payload(NodeId, NodeId) { return {b}; }
  Reply on_exchange(NodeId w, NodeId, const Msg&) { return {(*heads)[w] != 0}; }
  void on_reply(NodeId u, NodeId w, const Reply& r) {
    if (r.heads) (*attach)[u] = w;
  }
  void local_step(Engine&, std::uint64_t) {}
  bool halted() const { return false; }
};

struct FlipAcc {
  bool on = false;
  NodeId self = 0;
};

void merge_phase(Engine& e, SparseSubgraph& s, std::uint32_t phase, std::uint32_t& bound) {
  const Graph& g = e.graph();
  const std::uint32_t n = g.n();
  const std::uint64_t ib = bits_for(g.id_bound());
  Forest& f = s.forest;

  // Coin per cluster, broadcast down the tree.
  std::vector<std::optional<std::uint8_t>> coin(n + 1);
  std::vector<char> tails(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) {
    if (!f.is_root(v)) continue;
    coin[v] = static_cast<std::uint8_t>(e.rng(v)() & 1);
    tails[v] = *coin[v] == 0;
  }
  broadcast(e, f, coin, bound, [](std::uint8_t) { return 1; });
  std::vector<char> heads(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) heads[v] = coin[v] && *coin[v] == 1;

  // Tails clusters sample an edge of G[hbar] leaving them.
  const EdgeKeep keep = [&s](NodeId v, NodeId u) { return s.hbar[v] && s.hbar[u]; };
  const EdgeSample smp =
      sample_outgoing_edge(e, f, keep, bound, s.sched.merge_reps, &tails, 0x6d65726765ULL + phase);

  // The inside endpoint asks whether the other side chose heads.
  std::vector<NodeId> attach(n + 1, 0);
  Landing land{&heads, {}, &attach, 1 + 2 * ib};
  for (NodeId x = 1; x <= n; ++x) {
    if (!f.is_root(x) || !tails[x] || !smp.edge[x]) continue;
    auto [a, b] = *smp.edge[x];
    const bool a_in = f.root[a] == x, b_in = f.root[b] == x;
    if (a_in == b_in) {
      ++s.soundness_violations;
      continue;
    }
    land.contacts.emplace_back(a_in ? a : b, a_in ? b : a);
  }
  std::sort(land.contacts.begin(), land.contacts.end());
  e.step(land);

  // Re-root each merging tails tree at its attaching node.
  std::vector<char> merging(n + 1, 0);
  std::vector<FlipAcc> acc(n + 1);
  for (NodeId v = 1; v <= n; ++v) {
    acc[v].self = v;
    if (attach[v]) {
      acc[v].on = true;
      merging[f.root[v]] = 1;
    }
  }
  std::vector<NodeId> flip(n + 1, 0);
  convergecast(
      e, f, acc, bound,
      [&flip](FlipAcc& a, const FlipAcc& in) {
        if (in.on && !a.on) {
          a.on = true;
          flip[a.self] = in.self;
        }
      },
      [ib](const FlipAcc&) { return 1 + ib; }, &merging);
  for (NodeId v = 1; v <= n; ++v) {
    if (attach[v])
      f.parent[v] = attach[v];
    else if (flip[v])
      f.parent[v] = flip[v];
  }

  // Fresh depths and root labels.
  const std::uint32_t next = std::min<std::uint32_t>(3 * bound + 1, s.sched.kappa);
  std::vector<std::uint64_t> value(n + 1, 0);
  std::vector<char> served(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (f.is_root(v)) served[v] = 1;
  pull_broadcast(e, f, value, served, next, 1);
  for (NodeId v = 1; v <= n; ++v)
    if (s.hbar[v] && !served[v])
      throw Error(ErrorKind::kPhaseOverrun, "merged tree deeper than its bound " +
                                                std::to_string(next));
  bound = next;
}

// Component labels of the given edge set (union-find).
std::vector<NodeId> components(std::uint32_t n, const std::vector<std::pair<NodeId, NodeId>>& es) {
  std::vector<NodeId> up(n + 1);
  std::iota(up.begin(), up.end(), 0);
  auto find = [&](NodeId x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (auto [a, b] : es) {
    const NodeId ra = find(a), rb = find(b);
    if (ra != rb) up[std::max(ra, rb)] = std::min(ra, rb);
  }
  for (NodeId v = 1; v <= n; ++v) up[v] = find(v);
  return up;
}

}  // namespace

SparseSubgraph sparsify(Engine& e, const GeneralConfig& cfg) {
  const Graph& g = e.graph();
  const std::uint32_t n = g.n();
  const std::uint64_t ib = bits_for(g.id_bound());
  SparseSubgraph s;
  s.n = n;
  s.sched = general_schedule(n, cfg);
  s.star.assign(n + 1, 0);
  s.low.assign(n + 1, 0);
  s.hbar.assign(n + 1, 0);
  s.forest = Forest(n);

  // Sampling phase.
  e.mark("sampling");
  const double p_star = std::pow(std::max<double>(n, 2), -cfg.delta_exp);
  bool any_high = false;
  std::uint32_t longest_low = 0;
  for (NodeId v = 1; v <= n; ++v) {
    s.star[v] = uniform01(e.rng(v)) < p_star;
    if (!s.star[v] && g.degree(v) < s.sched.threshold) {
      s.low[v] = 1;
      longest_low = std::max(longest_low, g.degree(v));
    }
    if (!s.star[v] && !s.low[v] && g.degree(v) > 0) any_high = true;
  }
  std::vector<NodeId> star_seen(n + 1, 0);
  Discovery disc{&g, &s, &e, &star_seen};
  const std::uint32_t busy = any_high ? s.sched.discovery : std::min(longest_low, s.sched.discovery);
  e.execute(disc, busy);
  e.idle(s.sched.discovery - busy);
  for (NodeId v = 1; v <= n; ++v) {
    if (s.low[v]) continue;
    s.hbar[v] = 1;
    if (s.star[v]) {
      s.forest.make_root(v);
    } else if (star_seen[v]) {
      s.forest.parent[v] = star_seen[v];
      s.forest.depth[v] = 1;
      s.forest.root[v] = star_seen[v];
    } else {
      s.star[v] = 1;
      s.forest.make_root(v);
      ++s.fallback_stars;
    }
  }

  // Tree-merging phases on G[hbar].
  std::uint32_t bound = 1;
  for (std::uint32_t i = 1; i <= s.sched.merge_phases; ++i) {
    e.mark("tree-merge-" + std::to_string(i));
    merge_phase(e, s, i, bound);
    ++s.merge_phases_run;
  }
  {
    // Every component of G[hbar] must now be one tree.
    const auto comp = components(n, e_hbar(g, s));
    std::vector<NodeId> tree_of_comp(n + 1, 0);
    for (NodeId v = 1; v <= n; ++v) {
      if (!s.hbar[v]) continue;
      NodeId& t = tree_of_comp[comp[v]];
      if (t == 0) t = s.forest.root[v];
      if (t != s.forest.root[v])
        throw Error(ErrorKind::kMergeStall, "a component of the high-degree part is still split "
                                            "after " + std::to_string(s.merge_phases_run) +
                                                " merging phases");
    }
  }

  // MPX on G[E_L] with L as the driving cover.
  e.mark("mpx");
  const ArcGraph h = ArcGraph::from_edges(n, e_l(g, s));
  s.mpx = mpx_decompose(e, h, s.low, s.sched.threshold, cfg.beta_mpx, {}, s.sched.mpx_rounds);
  {
    const Forest mf = s.mpx.forest();
    std::vector<std::optional<std::uint64_t>> rid(n + 1);
    for (NodeId v = 1; v <= n; ++v)
      if (mf.is_root(v)) rid[v] = v;
    broadcast(e, mf, rid, static_cast<std::uint32_t>(std::floor(s.sched.shift_cap)),
              [ib](std::uint64_t) { return ib; });
  }
  // One simulated round to learn every neighbor's cluster.
  std::vector<MaybeMsg> out(h.arcs()), in;
  for (std::size_t a = 0; a < h.arcs(); ++a)
    out[a] = CongestMsg{{s.mpx.root[h.tail(a)], 0, 0}, static_cast<std::uint32_t>(ib)};
  simulate_congest_round(e, h, s.low, s.sched.threshold, out, in);
  std::vector<std::pair<NodeId, NodeId>> kept;
  for (NodeId v = 1; v <= n; ++v) {
    std::map<NodeId, NodeId> pick;  // neighboring cluster -> lowest neighbor in it
    for (std::size_t a = h.begin(v); a < h.end(v); ++a) {
      const auto c = static_cast<NodeId>(in[a]->w[0]);
      const NodeId u = h.head(a);
      if (c == s.mpx.root[v]) {
        if (u == s.mpx.parent[v]) kept.emplace_back(v, u);
        continue;
      }
      auto it = pick.find(c);
      if (it == pick.end() || u < it->second) pick[c] = u;
    }
    for (auto [c, u] : pick) kept.emplace_back(v, u);
  }
  // An edge kept from both sides is driven by its lower endpoint.
  std::sort(kept.begin(), kept.end(), [](auto x, auto y) {
    return std::minmax(x.first, x.second) < std::minmax(y.first, y.second) ||
           (std::minmax(x.first, x.second) == std::minmax(y.first, y.second) && x.first < y.first);
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0 && std::minmax(kept[i].first, kept[i].second) ==
                     std::minmax(kept[i - 1].first, kept[i - 1].second))
      continue;
    s.el_prime.push_back(kept[i]);
  }
  return s;
}

SparsifyResult sparsify(const Graph& g, const GeneralConfig& cfg, std::uint64_t seed) {
  Engine e(g, cfg.budget, cfg.max_rounds ? cfg.max_rounds : general_round_cap(g.n(), cfg), seed);
  SparsifyResult r;
  r.sparse = sparsify(e, cfg);
  r.trace = e.trace();
  return r;
}

// ---- rumor spreading ----

namespace {

struct SpreadState {
  std::vector<std::uint64_t> value;  // 0 = nothing yet
  std::vector<NodeId> origin;        // node the value started at
  std::vector<NodeId> first_from;
  std::vector<std::uint32_t> depth;
  // Next-round buffers.
  std::vector<std::uint64_t> cand;
  std::vector<NodeId> cand_from;
  std::vector<NodeId> cand_origin;
  std::vector<std::uint32_t> cand_depth;

  // Larger values win, then lower sender IDs.
  void offer(NodeId to, NodeId from, std::uint64_t val, NodeId org, std::uint32_t d) {
    if (val <= value[to]) return;
    if (val > cand[to] || (val == cand[to] && from < cand_from[to])) {
      cand[to] = val;
      cand_from[to] = from;
      cand_origin[to] = org;
      cand_depth[to] = d + 1;
    }
  }
};

// Round one of a phase: every hbar node with a tree parent calls it, and the
// rumor crosses in whichever direction it can.
struct ForestRound {
  struct Msg {
    std::uint64_t val;
    NodeId origin;
    std::uint32_t depth;
    std::uint64_t id_bits;
    std::uint64_t bits() const { return val ? 1 + 64 + 32 + id_bits : 1; }
  };
  using Reply = Msg;
  const SparseSubgraph* s;
  SpreadState* st;
  std::uint64_t id_bits;

  Msg of(NodeId v) const { return {st->value[v], st->origin[v], st->depth[v], id_bits}; }
  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= s->n; ++v)
      if (s->hbar[v] && s->forest.parent[v]) c.emplace_back(v, s->forest.parent[v]);
  }
  Msg payload(NodeId u, NodeId) { return of(u); }
  Reply on_exchange(NodeId w, NodeId u, const Msg& m) {
    st->offer(w, u, m.val, m.origin, m.depth);
    return of(w);
  }
  void on_reply(NodeId u, NodeId w, const Reply& r) { st->offer(u, w, r.val, r.origin, r.depth); }
  void local_step(Engine&, std::uint64_t) {}
  bool halted() const { return false; }
};

std::uint32_t commit(SpreadState& st) {
  std::uint32_t fresh = 0;
  for (NodeId v = 1; v < st.cand.size(); ++v) {
    if (!st.cand[v]) continue;
    st.value[v] = st.cand[v];
    st.origin[v] = st.cand_origin[v];
    st.first_from[v] = st.cand_from[v];
    st.depth[v] = st.cand_depth[v];
    st.cand[v] = 0;
    st.cand_from[v] = 0;
    ++fresh;
  }
  return fresh;
}

}  // namespace

std::uint64_t general_round_cap(std::uint32_t n, const GeneralConfig& cfg) {
  const GeneralSchedule s = general_schedule(n, cfg);
  const std::uint64_t id_bound = std::max<std::uint64_t>(4, std::uint64_t{n} * n);
  const std::uint64_t budget = cfg.budget.max_bits(id_bound);
  const std::uint64_t merge_chunks = sketch_chunks(SketchParams{0, id_bound, s.merge_reps}, budget);
  const std::uint64_t check_chunks = sketch_chunks(SketchParams{0, id_bound, s.check_reps}, budget);
  std::uint64_t total = s.discovery;
  total += std::uint64_t{s.merge_phases} * (7ULL * s.kappa + merge_chunks + 1);
  total += std::uint64_t{s.mpx_rounds + 1} * s.threshold + s.mpx_rounds;
  const std::uint64_t lg = ceil_log2(std::max<std::uint32_t>(n, 2));
  const auto base = static_cast<std::uint64_t>(
      std::ceil(std::pow(std::max<double>(n, 2), 1.0 - cfg.delta_exp)));
  std::uint64_t phases = 0;
  for (std::uint64_t d = 2; d <= 8ULL * std::max<std::uint32_t>(n, 2); d *= 2) {
    const std::uint64_t p = (d + base) * lg;
    phases += p;
    total += p * (1 + s.kept_bound) + 6 * phases + check_chunks;
  }
  return total + 1000;
}

GeneralResult spread_general(const Graph& g, const std::vector<std::uint64_t>& initial,
                             const GeneralConfig& cfg, std::uint64_t seed) {
  const std::uint32_t n = g.n();
  if (initial.size() != std::size_t{n} + 1) throw Error(ErrorKind::kConfigInvalid, "initial values must have n + 1 entries");
  Engine e(g, cfg.budget, cfg.max_rounds ? cfg.max_rounds : general_round_cap(n, cfg), seed);
  GeneralResult res;
  res.sparse = sparsify(e, cfg);
  res.stats.sparsify_rounds = e.round();
  const SparseSubgraph& s = res.sparse;

  // E'_L with its drivers, for one simulated CONGEST round per phase.
  const ArcGraph h = ArcGraph::from_edges(n, s.e_l_prime());
  std::vector<char> owned(h.arcs(), 0);
  for (auto [d, o] : s.el_prime) owned[static_cast<std::size_t>(h.arc(d, o))] = 1;

  SpreadState st;
  st.value = initial;
  st.value[0] = 0;
  st.origin.assign(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (st.value[v]) st.origin[v] = v;
  st.first_from.assign(n + 1, 0);
  st.depth.assign(n + 1, 0);
  st.cand.assign(n + 1, 0);
  st.cand_from.assign(n + 1, 0);
  st.cand_origin.assign(n + 1, 0);
  st.cand_depth.assign(n + 1, 0);

  const std::uint64_t id_bits = bits_for(std::max<std::uint64_t>(4, std::uint64_t{n} * n));
  const std::uint64_t lg = ceil_log2(std::max<std::uint32_t>(n, 2));
  const auto base = static_cast<std::uint64_t>(
      std::ceil(std::pow(std::max<double>(n, 2), 1.0 - cfg.delta_exp)));
  std::uint64_t total_phases = 0;
  std::vector<MaybeMsg> out(h.arcs()), in;
  ForestRound fr{&s, &st, id_bits};
  const CongestSimulator sim(g, h, owned, s.sched.kept_bound);

  for (std::uint64_t d_est = 2;; d_est *= 2) {
    e.mark("spread-Dest=" + std::to_string(d_est));
    ++res.stats.epochs;
    const std::uint64_t phases = (d_est + base) * lg;
    for (std::uint64_t p = 0; p < phases; ++p) {
      const Trace before = e.trace();
      e.step(fr);
      std::uint32_t fresh = commit(st);
      for (std::size_t a = 0; a < h.arcs(); ++a) {
        const NodeId t = h.tail(a);
        out[a] = st.value[t] ? MaybeMsg(CongestMsg{{st.value[t], st.depth[t], st.origin[t]},
                                                   static_cast<std::uint32_t>(64 + 32 + id_bits)})
                             : std::nullopt;
      }
      sim.run(e, out, in);
      for (NodeId v = 1; v <= n; ++v)
        for (std::size_t a = h.begin(v); a < h.end(v); ++a)
          if (in[a])
            st.offer(v, h.head(a), in[a]->w[0], static_cast<NodeId>(in[a]->w[2]),
                     static_cast<std::uint32_t>(in[a]->w[1]));
      fresh += commit(st);
      ++total_phases;
      if (fresh == 0 && p + 1 < phases) {
        // Nothing moved, so every later phase of this epoch repeats this one.
        const Trace& now = e.trace();
        const std::uint64_t k = phases - p - 1;
        e.fast_forward(k * (now.rounds - before.rounds), k * (now.messages - before.messages),
                       k * (now.total_bits - before.total_bits), now.max_message_bits);
        total_phases += k;
        break;
      }
    }

    // Termination check over the first-receipt trees. A tree without an
    // outgoing edge spans the graph, so one such verdict ends every node.
    // A node whose parent has since moved on to a larger value is cut off:
    // the parent drops sketches carrying another root label.
    Forest tree(n);
    std::vector<std::uint32_t> order;
    for (NodeId v = 1; v <= n; ++v)
      if (st.value[v]) order.push_back(v);
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return st.depth[a] < st.depth[b]; });
    for (NodeId v : order) {
      const NodeId p = st.first_from[v];
      if (p && (!tree.in_forest(p) || st.origin[p] != st.origin[v])) continue;
      tree.parent[v] = p;
      tree.depth[v] = st.depth[v];
      tree.root[v] = st.origin[v];
    }
    const auto bound = static_cast<std::uint32_t>(std::min<std::uint64_t>(2 * total_phases, UINT32_MAX));
    const EdgeSample smp =
        sample_outgoing_edge(e, tree, {}, bound, s.sched.check_reps, nullptr, 0x7370726561ULL + d_est);
    bool halt = false;
    for (NodeId r : tree.roots()) halt = halt || !smp.edge[r];
    if (halt) {
      res.tree = std::move(tree);
      res.stats.final_d_est = d_est;
      break;
    }
  }

  res.stats.spread_phases = total_phases;
  res.rumor = st.value;
  bool all = true;
  for (NodeId v = 1; v <= n; ++v) all = all && st.value[v] != 0;
  res.stats.halted_spanning = all && res.tree.roots().size() == 1;
  res.trace = e.trace();
  res.trace.outputs = res.rumor;
  return res;
}

GeneralResult rumor_spread_general(const Graph& g, NodeId source, const GeneralConfig& cfg,
                                   std::uint64_t seed) {
  if (source == 0 || source > g.n()) throw Error(ErrorKind::kIdOutOfRange, "source outside 1..n");
  if (cfg.rumor == 0) throw Error(ErrorKind::kConfigInvalid, "rumor must be nonzero");
  std::vector<std::uint64_t> init(g.n() + 1, 0);
  init[source] = cfg.rumor;
  return spread_general(g, init, cfg, seed);
}

}  // namespace gossip
