#include "gossip/applications.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <unordered_set>

#include <boost/pending/disjoint_sets.hpp>

namespace gossip {

// ---- spanning tree ----

SpreadRun spread_run(const WeakCondResult& r, NodeId source) {
  return {source, r.tree, r.rumor, r.trace};
}

SpreadRun spread_run(const GeneralResult& r, NodeId source) {
  return {source, r.tree, r.rumor, r.trace};
}

namespace {

struct PushPull {
  struct Msg {
    bool has;
    std::uint64_t bits() const { return has ? 65 : 1; }
  };
  using Reply = Msg;

  const Graph* g;
  std::vector<char> informed;
  std::vector<NodeId> cand;
  std::uint32_t missing = 0;
  Forest tree;

  void offer(NodeId to, NodeId from) {
    if (informed[to]) return;
    if (cand[to] == 0 || from < cand[to]) cand[to] = from;
  }
  void choose_contacts(Engine& e, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= g->n(); ++v) {
      const auto nb = g->neighbors(v);
      if (!nb.empty()) c.emplace_back(v, nb[uniform_below(e.rng(v), nb.size())]);
    }
  }
  Msg payload(NodeId u, NodeId) { return {informed[u] != 0}; }
  Reply on_exchange(NodeId w, NodeId u, const Msg& m) {
    if (m.has) offer(w, u);
    return {informed[w] != 0};
  }
  void on_reply(NodeId u, NodeId w, const Reply& r) {
    if (r.has) offer(u, w);
  }
  void local_step(Engine&, std::uint64_t) {
    for (NodeId v = 1; v <= g->n(); ++v) {
      if (!cand[v]) continue;
      informed[v] = 1;
      tree.parent[v] = cand[v];
      tree.depth[v] = tree.depth[cand[v]] + 1;
      tree.root[v] = tree.root[cand[v]];
      cand[v] = 0;
      --missing;
    }
  }
  bool halted() const { return missing == 0; }
};

}  // namespace

SpreadRun uniform_push_pull(const Graph& g, NodeId source, std::uint64_t seed,
                            std::uint64_t max_rounds, Budget budget, std::uint64_t rumor) {
  const std::uint32_t n = g.n();
  if (source == 0 || source > n) throw Error(ErrorKind::kIdOutOfRange, "source outside 1..n");
  Engine e(g, budget, max_rounds, seed);
  PushPull p{&g, std::vector<char>(n + 1, 0), std::vector<NodeId>(n + 1, 0), n - 1, Forest(n)};
  p.informed[source] = 1;
  p.tree.make_root(source);
  e.execute(p, max_rounds);
  SpreadRun r;
  r.source = source;
  r.tree = std::move(p.tree);
  r.rumor.assign(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v)
    if (p.informed[v]) r.rumor[v] = rumor;
  r.trace = e.trace();
  r.trace.outputs = r.rumor;
  return r;
}

Forest extract_spanning_tree(const Graph& g, const SpreadRun& run) {
  const std::uint32_t n = g.n();
  if (run.rumor.size() != std::size_t{n} + 1 || run.tree.n() != n)
    throw Error(ErrorKind::kSpreadIncomplete, "run does not match the graph");
  std::uint32_t missing = 0;
  for (NodeId v = 1; v <= n; ++v) missing += run.rumor[v] == 0;
  if (missing) throw Error(ErrorKind::kSpreadIncomplete, std::to_string(missing) + " nodes lack the rumor");
  const Forest& t = run.tree;
  for (NodeId v = 1; v <= n; ++v)
    if (t.root[v] != run.source)
      throw Error(ErrorKind::kSpreadIncomplete, "node " + std::to_string(v) + " is not in the source's tree");
  if (!t.is_root(run.source) || !forest_consistent(g, t))
    throw Error(ErrorKind::kSpreadIncomplete, "first-receipt parents do not form a tree");
  if (t.max_depth() > run.trace.rounds)
    throw Error(ErrorKind::kSpreadIncomplete, "tree deeper than the rounds used");
  return t;
}

// ---- leader election ----

LeaderResult leader_election(const Graph& g, LeaderAlgorithm algo, std::uint64_t seed,
                             const WeakCondConfig& wc, const GeneralConfig& gc) {
  const std::uint32_t n = g.n();
  LeaderResult r;
  if (n == 1) {
    r.leader = {0, 1};
    r.tree = Forest(1);
    r.tree.make_root(1);
    r.trace.seed = seed;
    r.trace.outputs = {0, 1};
    return r;
  }
  std::vector<std::uint64_t> out;
  if (algo == LeaderAlgorithm::kWeakCond) {
    WeakCondResult w = elect_leader_weakcond(g, wc, seed);
    out = std::move(w.rumor);
    r.tree = std::move(w.tree);
    r.trace = std::move(w.trace);
  } else {
    // Every node spreads its own ID; the largest survives.
    std::vector<std::uint64_t> init(n + 1, 0);
    for (NodeId v = 1; v <= n; ++v) init[v] = v;
    GeneralResult gr = spread_general(g, init, gc, seed);
    out = std::move(gr.rumor);
    r.tree = std::move(gr.tree);
    r.trace = std::move(gr.trace);
  }
  r.leader.assign(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) r.leader[v] = static_cast<NodeId>(out[v]);
  return r;
}

// ---- aggregates ----

std::string agg_op_name(AggOp op) {
  switch (op) {
    case AggOp::kMin: return "min";
    case AggOp::kMax: return "max";
    case AggOp::kSum: return "sum";
    case AggOp::kCount: return "count";
    case AggOp::kAverage: return "average";
  }
  return "?";
}

AggOp parse_agg_op(const std::string& s) {
  for (AggOp op : {AggOp::kMin, AggOp::kMax, AggOp::kSum, AggOp::kCount, AggOp::kAverage})
    if (agg_op_name(op) == s) return op;
  throw Error(ErrorKind::kConfigInvalid, "unknown aggregate op '" + s + "'");
}

std::vector<AggValue> aggregate(Engine& e, const Forest& tree, const AggregateSpec& spec,
                                const std::vector<std::uint64_t>& values) {
  const std::uint32_t n = tree.n();
  if (values.size() != std::size_t{n} + 1)
    throw Error(ErrorKind::kInvalidParameters, "values must have n + 1 entries");
  const auto roots = tree.roots();
  for (NodeId v = 1; v <= n; ++v)
    if (!tree.in_forest(v) || roots.size() != 1)
      throw Error(ErrorKind::kSpreadIncomplete, "aggregate needs one spanning tree");
  if (spec.value_bits == 0 || spec.value_bits > 64)
    throw Error(ErrorKind::kWidthOverflow, "value width must be 1..64 bits");
  const std::uint64_t count_bits = bits_for(n);
  const std::uint64_t msg_bits = spec.value_bits + count_bits;
  if (msg_bits > e.budget_bits())
    throw Error(ErrorKind::kWidthOverflow, "aggregate message of " + std::to_string(msg_bits) +
                                               " bits exceeds the budget");
  const std::uint64_t top = spec.value_bits == 64 ? UINT64_MAX : (1ULL << spec.value_bits) - 1;
  std::vector<AggValue> acc(n + 1);
  for (NodeId v = 1; v <= n; ++v) {
    const std::uint64_t x = spec.op == AggOp::kCount ? 1 : values[v];
    if (x > top)
      throw Error(ErrorKind::kWidthOverflow, "value at node " + std::to_string(v) + " exceeds " +
                                                 std::to_string(spec.value_bits) + " bits");
    acc[v] = {x, 1};
  }
  const AggOp op = spec.op;
  convergecast(
      e, tree, acc, tree.max_depth(),
      [op, top](AggValue& a, const AggValue& b) {
        switch (op) {
          case AggOp::kMin: a.value = std::min(a.value, b.value); break;
          case AggOp::kMax: a.value = std::max(a.value, b.value); break;
          default:
            if (b.value > top - a.value) throw Error(ErrorKind::kWidthOverflow, "sum overflows the value width");
            a.value += b.value;
        }
        a.count += b.count;
      },
      [msg_bits](const AggValue&) { return msg_bits; });
  std::vector<std::optional<AggValue>> down(n + 1);
  down[roots[0]] = acc[roots[0]];
  broadcast(e, tree, down, tree.max_depth(), [msg_bits](const AggValue&) { return msg_bits; });
  std::vector<AggValue> out(n + 1);
  for (NodeId v = 1; v <= n; ++v) out[v] = *down[v];
  return out;
}

AggregateResult aggregate(const Graph& g, const Forest& tree, const AggregateSpec& spec,
                          const std::vector<std::uint64_t>& values, Budget budget,
                          std::uint64_t seed) {
  Engine e(g, budget, kDefaultMaxRounds, seed);
  AggregateResult r;
  r.result = aggregate(e, tree, spec, values);
  r.trace = e.trace();
  r.trace.outputs.assign(g.n() + 1, 0);
  for (NodeId v = 1; v <= g.n(); ++v) r.trace.outputs[v] = r.result[v].value;
  return r;
}

// ---- minimum spanning tree ----

std::vector<Edge> kruskal_mst(const Graph& g) {
  std::vector<Edge> es = g.edges();
  std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });
  boost::disjoint_sets_with_storage<> ds(g.n() + 1);
  std::vector<Edge> out;
  for (const Edge& e : es) {
    if (ds.find_set(e.u) == ds.find_set(e.v)) continue;
    ds.union_set(e.u, e.v);
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Candidate outgoing edge; w == 0 means none (weights are positive).
struct Cand {
  std::uint64_t w = 0;
  NodeId u = 0;  // inside endpoint
  NodeId v = 0;
  bool better(const Cand& o) const { return o.w != 0 && (w == 0 || o.w < w); }
};

struct Item {
  std::uint64_t key = 0;
  Cand c;
};

// Pipelined upcast of keyed candidates over a tree with min-combining per
// key. Every node emits keys in increasing order and waits until each
// child has either passed the key or ended, so a key leaves a node exactly
// once with its final value.
struct Upcast {
  struct Msg {
    const std::vector<Item>* items;
    bool end;
    std::uint64_t item_bits;
    std::uint64_t bits() const { return 1 + items->size() * item_bits; }
  };
  using Reply = detail::Ack;

  const Forest* t = nullptr;
  const std::vector<std::vector<NodeId>>* children = nullptr;
  std::uint32_t cap = 1;
  std::uint64_t item_bits = 0;
  std::vector<std::map<std::uint64_t, Cand>> own;
  std::vector<std::map<NodeId, std::deque<Item>>> queue;
  std::vector<char> done;
  std::vector<std::vector<Item>> batch;
  std::vector<char> batch_end;
  std::vector<Item> at_root;
  std::uint32_t unfinished = 0;

  // Emits up to cap items for v; returns true if v has finished.
  bool emit(NodeId v, std::vector<Item>& out) {
    while (out.size() < cap) {
      std::optional<std::uint64_t> k;
      if (!own[v].empty()) k = own[v].begin()->first;
      for (NodeId c : (*children)[v]) {
        auto& q = queue[v][c];
        if (q.empty()) continue;
        if (!k || q.front().key < *k) k = q.front().key;
      }
      // A child with an empty queue that has not ended may still send a
      // smaller key.
      bool blocked = false;
      for (NodeId c : (*children)[v])
        if (queue[v][c].empty() && !child_ended(v, c)) blocked = true;
      if (blocked) return false;
      if (!k) return true;
      Item it{*k, {}};
      if (auto o = own[v].find(*k); o != own[v].end()) {
        it.c = o->second;
        own[v].erase(o);
      }
      for (NodeId c : (*children)[v]) {
        auto& q = queue[v][c];
        if (!q.empty() && q.front().key == *k) {
          if (it.c.better(q.front().c)) it.c = q.front().c;
          q.pop_front();
        }
      }
      out.push_back(it);
    }
    return own[v].empty() && all_children_drained(v);
  }
  std::vector<std::vector<NodeId>> ended;  // ended children, by parent
  bool child_ended(NodeId v, NodeId c) const {
    return std::find(ended[v].begin(), ended[v].end(), c) != ended[v].end();
  }
  bool all_children_drained(NodeId v) {
    for (NodeId c : (*children)[v])
      if (!queue[v][c].empty() || !child_ended(v, c)) return false;
    return true;
  }

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= t->n(); ++v) {
      if (done[v]) continue;
      batch[v].clear();
      const bool fin = emit(v, batch[v]);
      batch_end[v] = fin;
      if (t->parent[v] == 0) {
        at_root.insert(at_root.end(), batch[v].begin(), batch[v].end());
        if (fin) {
          done[v] = 1;
          --unfinished;
        }
        continue;
      }
      if (!batch[v].empty() || fin) c.emplace_back(v, t->parent[v]);
    }
  }
  Msg payload(NodeId u, NodeId) { return {&batch[u], batch_end[u] != 0, item_bits}; }
  Reply on_exchange(NodeId w, NodeId u, const Msg& m) {
    auto& q = queue[w][u];
    q.insert(q.end(), m.items->begin(), m.items->end());
    if (m.end) ended[w].push_back(u);
    return {};
  }
  void on_reply(NodeId u, NodeId, const Reply&) {
    if (batch_end[u]) {
      done[u] = 1;
      --unfinished;
    }
  }
  void local_step(Engine&, std::uint64_t) {}
  bool halted() const { return unfinished == 0; }
};

// Pipelined downcast of the root's item list: every node pulls the next
// batch from its parent until it holds the whole list.
struct Downcast {
  struct Msg {
    std::uint32_t have;
    std::uint64_t bits() const { return 32; }
  };
  struct Reply {
    std::vector<Item> items;
    bool complete;
    std::uint64_t b;
    std::uint64_t bits() const { return b; }
  };

  const Forest* t;
  std::uint32_t cap;
  std::uint64_t item_bits;
  std::vector<std::vector<Item>> list;
  std::vector<char> complete;
  std::uint32_t waiting = 0;
  std::vector<std::pair<NodeId, Reply>> pending;

  void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
    for (NodeId v = 1; v <= t->n(); ++v)
      if (!complete[v]) c.emplace_back(v, t->parent[v]);
  }
  Msg payload(NodeId u, NodeId) { return {static_cast<std::uint32_t>(list[u].size())}; }
  Reply on_exchange(NodeId w, NodeId, const Msg& m) {
    Reply r{{}, false, 1};
    const std::size_t hi = std::min<std::size_t>(list[w].size(), std::size_t{m.have} + cap);
    r.items.assign(list[w].begin() + std::min<std::size_t>(m.have, hi), list[w].begin() + hi);
    r.complete = complete[w] && hi == list[w].size();
    r.b = 1 + r.items.size() * item_bits;
    return r;
  }
  void on_reply(NodeId u, NodeId, const Reply& r) { pending.emplace_back(u, r); }
  void local_step(Engine&, std::uint64_t) {
    for (auto& [u, r] : pending) {
      list[u].insert(list[u].end(), r.items.begin(), r.items.end());
      if (r.complete) {
        complete[u] = 1;
        --waiting;
      }
    }
    pending.clear();
  }
  bool halted() const { return waiting == 0; }
};

class MstRun {
 public:
  MstRun(const Graph& g, const Forest& backbone, const MstConfig& cfg, Engine& e)
      : g_(g), bb_(backbone), cfg_(cfg), e_(e), n_(g.n()) {
    ib_ = bits_for(g.id_bound());
    std::uint64_t wmax = 1;
    for (const Edge& x : g.edges()) wmax = std::max(wmax, x.w);
    wb_ = bits_for(wmax);
    item_bits_ = 2 * ib_ + ib_ + wb_;
    cap_ = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, (e.budget_bits() - 1) / item_bits_));
    std::vector<std::pair<NodeId, NodeId>> all;
    for (const Edge& x : g.edges()) all.emplace_back(x.u, x.v);
    h_ = ArcGraph::from_edges(n_, all);
  }

  MstResult run() {
    MstResult res;
    census();
    db_ = bb_.max_depth();
    // The backbone height and the maximum degree, learned over the backbone.
    {
      std::vector<std::uint64_t> deg(n_ + 1, 0);
      for (NodeId v = 1; v <= n_; ++v) deg[v] = g_.degree(v);
      delta_ = static_cast<std::uint32_t>(global_max(deg));
    }
    std::vector<char> all_cover(n_ + 1, 1);
    owned_ = cover_ownership(h_, all_cover);
    sim_.emplace(g_, h_, owned_, std::max<std::uint32_t>(delta_, 1));

    const std::uint64_t start = e_.round();
    frag_ = Forest(n_);
    for (NodeId v = 1; v <= n_; ++v) frag_.make_root(v);
    const std::uint32_t phases = std::max<std::uint32_t>(1, ceil_log2(n_));
    for (std::uint32_t i = 1; i <= phases; ++i) {
      e_.mark("mst-stage1-" + std::to_string(i));
      stage1_phase(res.stats);
      ++res.stats.stage1_phases;
    }
    res.stats.stage1_rounds = e_.round() - start;
    for (NodeId v = 1; v <= n_; ++v)
      if (frag_.parent[v]) edges_.push_back(norm(v, frag_.parent[v]));
    res.stats.fragments_after_stage1 = static_cast<std::uint32_t>(frag_.roots().size());

    const std::uint64_t mid = e_.round();
    stage2(res.stats, phases);
    res.stats.stage2_rounds = e_.round() - mid;

    std::sort(edges_.begin(), edges_.end());
    res.edges = edges_;
    res.trace = e_.trace();
    return res;
  }

 private:
  Edge norm(NodeId a, NodeId b) const {
    return a < b ? Edge{a, b, g_.weight(a, b)} : Edge{b, a, g_.weight(a, b)};
  }

  // Every node calls its backbone parent once, so parents learn children.
  void census() {
    struct Call {
      using Msg = detail::Ack;
      using Reply = detail::Ack;
      const Forest* t;
      std::vector<std::vector<NodeId>>* ch;
      void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
        for (NodeId v = 1; v <= t->n(); ++v)
          if (t->parent[v]) c.emplace_back(v, t->parent[v]);
      }
      Msg payload(NodeId, NodeId) { return {}; }
      Reply on_exchange(NodeId w, NodeId u, const Msg&) {
        (*ch)[w].push_back(u);
        return {};
      }
      void on_reply(NodeId, NodeId, const Reply&) {}
      void local_step(Engine&, std::uint64_t) {}
      bool halted() const { return false; }
    };
    children_.assign(n_ + 1, {});
    Call c{&bb_, &children_};
    e_.step(c);
    for (auto& v : children_) std::sort(v.begin(), v.end());
  }

  std::uint64_t global_max(const std::vector<std::uint64_t>& x) {
    return aggregate(e_, bb_, {AggOp::kMax, 64}, x)[1].value;
  }
  std::uint64_t global_sum(const std::vector<std::uint64_t>& x) {
    return aggregate(e_, bb_, {AggOp::kSum, 64}, x)[1].value;
  }

  // One simulated CONGEST round over all edges: nbr[a] = label of head(a).
  void learn_neighbor_labels(const std::vector<NodeId>& label) {
    std::vector<MaybeMsg> out(h_.arcs());
    for (std::size_t a = 0; a < h_.arcs(); ++a)
      out[a] = CongestMsg{{label[h_.tail(a)], 0, 0}, static_cast<std::uint32_t>(ib_)};
    sim_->run(e_, out, in_);
  }

  Cand local_candidate(NodeId v, const std::vector<NodeId>& label) const {
    Cand best;
    for (std::size_t a = h_.begin(v); a < h_.end(v); ++a) {
      if (!in_[a] || in_[a]->w[0] == label[v]) continue;
      const NodeId u = h_.head(a);
      const Cand c{g_.weight(v, u), v, u};
      if (best.better(c)) best = c;
    }
    return best;
  }

  // Lightest edge leaving the node set {x : label[x] == id}, from the
  // weights directly.
  std::vector<Cand> true_min_out(const std::vector<NodeId>& label) const {
    std::vector<Cand> best(n_ + 1);
    for (const Edge& x : g_.edges()) {
      if (label[x.u] == label[x.v]) continue;
      const Cand a{x.w, x.u, x.v}, b{x.w, x.v, x.u};
      if (best[label[x.u]].better(a)) best[label[x.u]] = a;
      if (best[label[x.v]].better(b)) best[label[x.v]] = b;
    }
    return best;
  }

  void stage1_phase(MstStats& st) {
    // Fragment height bound, learned over the backbone.
    std::vector<std::uint64_t> d(n_ + 1);
    for (NodeId v = 1; v <= n_; ++v) d[v] = frag_.depth[v];
    const auto lim = static_cast<std::uint32_t>(global_max(d));

    std::vector<NodeId> label(frag_.root);
    learn_neighbor_labels(label);

    struct Acc {
      Cand c;
      std::uint32_t height = 0;
    };
    std::vector<Acc> acc(n_ + 1);
    for (NodeId v = 1; v <= n_; ++v) acc[v] = {local_candidate(v, label), frag_.depth[v]};
    const std::uint64_t acc_bits = wb_ + 2 * ib_ + 32;
    convergecast(
        e_, frag_, acc, lim,
        [](Acc& a, const Acc& b) {
          if (a.c.better(b.c)) a.c = b.c;
          a.height = std::max(a.height, b.height);
        },
        [acc_bits](const Acc&) { return acc_bits; });

    // Roots decide; the decision goes to the whole fragment.
    const double cap = cfg_.c_f * std::sqrt(static_cast<double>(n_));
    std::vector<std::optional<Cand>> dec(n_ + 1);
    const auto truth = true_min_out(label);
    for (NodeId r = 1; r <= n_; ++r) {
      if (!frag_.is_root(r)) continue;
      const Acc& a = acc[r];
      if (a.c.w == 0 || 2.0 * a.height > cap) {
        dec[r] = Cand{};
        continue;
      }
      if (truth[r].w != a.c.w) ++st.cut_rule_violations;
      dec[r] = a.c;
    }
    broadcast(e_, frag_, dec, lim, [this](const Cand&) { return 1 + wb_ + 2 * ib_; });

    // Connect: the inside endpoint calls the outside one, which reports
    // whether its own fragment picked the same edge.
    struct Connect {
      struct Msg {
        std::uint64_t bits() const { return 1; }
      };
      struct Reply {
        bool mutual;
        std::uint64_t bits() const { return 1; }
      };
      const std::vector<std::optional<Cand>>* dec;
      std::vector<NodeId> callers;
      std::vector<char>* mutual;
      void choose_contacts(Engine&, std::uint64_t, std::vector<std::pair<NodeId, NodeId>>& c) {
        for (NodeId u : callers) c.emplace_back(u, (*dec)[u]->v);
      }
      Msg payload(NodeId, NodeId) { return {}; }
      Reply on_exchange(NodeId w, NodeId u, const Msg&) {
        const auto& mine = (*dec)[w];
        return {mine && mine->u == w && mine->v == u};
      }
      void on_reply(NodeId u, NodeId, const Reply& r) { (*mutual)[u] = r.mutual; }
      void local_step(Engine&, std::uint64_t) {}
      bool halted() const { return false; }
    };
    std::vector<char> mutual(n_ + 1, 0);
    std::vector<char> active(n_ + 1, 0);
    Connect con{&dec, {}, &mutual};
    for (NodeId v = 1; v <= n_; ++v)
      if (dec[v] && dec[v]->u == v) {
        con.callers.push_back(v);
        active[frag_.root[v]] = 1;
      }
    e_.step(con);

    // Re-root each initiating fragment at its endpoint: the path to the old
    // root learns, by convergecast, which child leads to the endpoint.
    struct Flip {
      NodeId self = 0;
      NodeId via = 0;  // child on the path, or self at the endpoint
    };
    std::vector<Flip> up(n_ + 1);
    for (NodeId v = 1; v <= n_; ++v) up[v] = {v, con_endpoint(dec, v) ? v : 0};
    convergecast(
        e_, frag_, up, lim,
        [](Flip& a, const Flip& b) {
          if (b.via) a.via = b.self;
        },
        [this](const Flip&) { return 1 + ib_; });
    for (NodeId v = 1; v <= n_; ++v) {
      if (!active[frag_.root[v]] || !up[v].via) continue;
      if (up[v].via != v) {
        frag_.parent[v] = up[v].via;
      } else {
        const NodeId w = dec[v]->v;
        frag_.parent[v] = mutual[v] && v > w ? 0 : w;
      }
    }
    relabel(lim);
  }

  static bool con_endpoint(const std::vector<std::optional<Cand>>& dec, NodeId v) {
    return dec[v] && dec[v]->u == v;
  }

  // Roots pull-broadcast labels and depths until the backbone confirms
  // that everyone is served.
  void relabel(std::uint32_t lim) {
    std::vector<char> served(n_ + 1, 0);
    std::vector<std::uint64_t> val(n_ + 1, 0);
    for (NodeId v = 1; v <= n_; ++v)
      if (frag_.parent[v] == 0) {
        frag_.make_root(v);
        served[v] = 1;
      }
    std::uint64_t chunk = 2ULL * lim + 2;
    for (;;) {
      pull_broadcast(e_, frag_, val, served, chunk, 0);
      std::vector<std::uint64_t> open(n_ + 1, 0);
      for (NodeId v = 1; v <= n_; ++v) open[v] = !served[v];
      if (global_max(open) == 0) break;
      if (chunk > 2ULL * n_) throw Error(ErrorKind::kPhaseOverrun, "fragment relabel did not finish");
      chunk *= 2;
    }
  }

  void stage2(MstStats& st, std::uint32_t phases) {
    std::vector<NodeId> label(frag_.root);
    std::vector<std::uint64_t> d(n_ + 1);
    for (NodeId v = 1; v <= n_; ++v) d[v] = frag_.depth[v];
    const auto lim = static_cast<std::uint32_t>(global_max(d));
    for (std::uint32_t j = 1;; ++j) {
      e_.mark("mst-stage2-" + std::to_string(j));
      std::vector<std::uint64_t> lead(n_ + 1, 0);
      for (NodeId v = 1; v <= n_; ++v) lead[v] = label[v] == v;
      const std::uint64_t k = global_sum(lead);
      if (k <= 1) break;
      if (j > phases + 1) throw Error(ErrorKind::kMergeStall, "stage 2 did not converge");
      ++st.stage2_phases;

      learn_neighbor_labels(label);
      // Per stage-1 fragment minimum first, then keyed upcast over the backbone.
      std::vector<Cand> acc(n_ + 1);
      for (NodeId v = 1; v <= n_; ++v) acc[v] = local_candidate(v, label);
      convergecast(
          e_, frag_, acc, lim,
          [](Cand& a, const Cand& b) {
            if (a.better(b)) a = b;
          },
          [this](const Cand&) { return wb_ + 2 * ib_; });

      Upcast up;
      up.t = &bb_;
      up.children = &children_;
      up.cap = cap_;
      up.item_bits = item_bits_;
      up.own.assign(n_ + 1, {});
      up.queue.assign(n_ + 1, {});
      up.ended.assign(n_ + 1, {});
      up.done.assign(n_ + 1, 0);
      up.batch.assign(n_ + 1, {});
      up.batch_end.assign(n_ + 1, 0);
      up.unfinished = n_;
      for (NodeId v = 1; v <= n_; ++v)
        if (frag_.is_root(v) && acc[v].w) up.own[v][label[v]] = acc[v];
      const std::uint64_t window = db_ + k + 1;
      const std::uint64_t used = e_.execute(up, window);
      if (!up.halted()) throw Error(ErrorKind::kPhaseOverrun, "candidate upcast overran its window");
      e_.idle(window - used);

      // The backbone root merges labels along the chosen edges.
      const auto truth = true_min_out(label);
      std::vector<Item> chosen = up.at_root;
      boost::disjoint_sets_with_storage<> ds(n_ + 1);
      std::vector<Item> news;
      for (const Item& it : chosen) {
        if (truth[it.key].w != it.c.w) ++st.cut_rule_violations;
        const auto a = ds.find_set(label[it.c.u]), b = ds.find_set(label[it.c.v]);
        if (a == b) continue;
        ds.link(a, b);
        news.push_back({0, it.c});
      }
      std::map<std::uint64_t, std::uint64_t> low;
      for (const Item& it : chosen) {
        const auto r = ds.find_set(it.key);
        auto [p, fresh] = low.try_emplace(r, it.key);
        if (!fresh) p->second = std::min(p->second, it.key);
      }
      for (const Item& it : chosen) {
        const std::uint64_t nl = low[ds.find_set(it.key)];
        if (nl != it.key) news.push_back({it.key, {nl, 0, 0}});
      }

      Downcast dn{&bb_, cap_, item_bits_, std::vector<std::vector<Item>>(n_ + 1),
                  std::vector<char>(n_ + 1, 0), n_ - 1, {}};
      for (NodeId v = 1; v <= n_; ++v)
        if (bb_.is_root(v)) {
          dn.list[v] = news;
          dn.complete[v] = 1;
        }
      const std::uint64_t dwin = db_ + 2 * k;
      const std::uint64_t dused = e_.execute(dn, dwin);
      if (!dn.halted()) throw Error(ErrorKind::kPhaseOverrun, "label downcast overran its window");
      e_.idle(dwin - dused);

      // Every node applies the same list.
      std::map<std::uint64_t, std::uint64_t> remap;
      for (const Item& it : news) {
        if (it.key == 0)
          edges_.push_back(norm(it.c.u, it.c.v));
        else
          remap[it.key] = it.c.w;
      }
      for (NodeId v = 1; v <= n_; ++v)
        if (auto p = remap.find(label[v]); p != remap.end()) label[v] = static_cast<NodeId>(p->second);
    }
  }

  const Graph& g_;
  const Forest& bb_;
  const MstConfig& cfg_;
  Engine& e_;
  std::uint32_t n_;
  std::uint64_t ib_ = 0, wb_ = 0, item_bits_ = 0;
  std::uint32_t cap_ = 1;
  std::uint32_t db_ = 0;
  std::uint32_t delta_ = 0;
  ArcGraph h_;
  std::vector<char> owned_;
  std::optional<CongestSimulator> sim_;
  std::vector<MaybeMsg> in_;
  std::vector<std::vector<NodeId>> children_;
  Forest frag_;
  std::vector<Edge> edges_;
};

void check_weights(const Graph& g) {
  if (!g.weighted() && g.m() > 1) throw Error(ErrorKind::kDuplicateWeights, "graph has no weights");
  std::unordered_set<std::uint64_t> seen;
  for (const Edge& x : g.edges())
    if (!seen.insert(x.w).second)
      throw Error(ErrorKind::kDuplicateWeights, "weight " + std::to_string(x.w) + " appears twice");
}

std::uint64_t mst_round_cap(std::uint32_t n, std::uint32_t delta, std::uint32_t db) {
  const std::uint64_t lg = std::max<std::uint32_t>(1, ceil_log2(std::max<std::uint32_t>(n, 2)));
  return 1000 + (2 * lg + 4) * (std::uint64_t{delta} + 16ULL * db + 16ULL * n + 16);
}

}  // namespace

MstResult mst(const Graph& g, const Forest& backbone, const MstConfig& cfg, std::uint64_t seed) {
  const std::uint32_t n = g.n();
  check_weights(g);
  const auto roots = backbone.n() == n ? backbone.roots() : std::vector<NodeId>{};
  bool spans = roots.size() == 1 && forest_consistent(g, backbone);
  for (NodeId v = 1; spans && v <= n; ++v) spans = backbone.in_forest(v);
  if (!spans) throw Error(ErrorKind::kBackboneMissing, "backbone is not a spanning tree of the graph");
  Engine e(g, cfg.budget,
           cfg.max_rounds ? cfg.max_rounds : mst_round_cap(n, g.max_degree(), backbone.max_depth()),
           seed);
  if (n == 1) {
    MstResult r;
    r.trace = e.trace();
    return r;
  }
  MstRun run(g, backbone, cfg, e);
  return run.run();
}

MstResult mst(const Graph& g, const MstConfig& cfg, const GeneralConfig& gc, std::uint64_t seed) {
  check_weights(g);
  if (g.n() == 1) {
    Forest one(1);
    one.make_root(1);
    return mst(g, one, cfg, seed);
  }
  GeneralConfig bc = gc;
  bc.budget = cfg.budget;
  const GeneralResult gr = rumor_spread_general(g, 1, bc, derive_seed(seed, 1));
  Forest bb;
  try {
    bb = extract_spanning_tree(g, spread_run(gr, 1));
  } catch (const Error& err) {
    throw Error(ErrorKind::kBackboneMissing, std::string("backbone run failed: ") + err.what());
  }
  MstResult r = mst(g, bb, cfg, derive_seed(seed, 2));
  // One trace for both parts.
  Trace t = gr.trace;
  append_trace(t, r.trace);
  t.seed = seed;
  t.outputs.clear();
  r.trace = std::move(t);
  return r;
}

}  // namespace gossip
