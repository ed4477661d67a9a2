#include "gossip/engine.hpp"

#include <algorithm>

#include <json.hpp>

namespace gossip {

Engine::Engine(const Graph& g, Budget budget, std::uint64_t max_rounds, std::uint64_t seed)
    : g_(&g),
      budget_bits_(budget.max_bits(g.id_bound())),
      max_rounds_(max_rounds),
      stamp_(g.n() + 1, UINT64_MAX) {
  trace_.seed = seed;
  rngs_.reserve(g.n() + 1);
  for (NodeId v = 0; v <= g.n(); ++v) rngs_.emplace_back(derive_seed(seed, v));
}

void Engine::idle(std::uint64_t k) {
  if (trace_.rounds + k > max_rounds_) {
    Error err(ErrorKind::kTimeout, "round cap reached without global halt");
    err.round = max_rounds_;
    throw err;
  }
  trace_.rounds += k;
}

void Engine::silent(std::uint64_t k, std::uint64_t contacts, std::uint64_t bits) {
  if (k == 0) return;
  if (contacts > 0) {
    if (bits > budget_bits_) charge(0, bits);
    trace_.total_bits += 2 * k * contacts * bits;
    trace_.max_message_bits = std::max(trace_.max_message_bits, bits);
    trace_.messages += 2 * k * contacts;
  }
  idle(k);
}

void Engine::fast_forward(std::uint64_t k, std::uint64_t messages, std::uint64_t bits,
                          std::uint64_t max_message_bits) {
  if (k == 0) return;
  idle(k);
  if (max_message_bits > budget_bits_) charge(0, max_message_bits);
  trace_.messages += messages;
  trace_.total_bits += bits;
  trace_.max_message_bits = std::max(trace_.max_message_bits, max_message_bits);
}

void Engine::begin_round() {
  if (trace_.rounds >= max_rounds_) {
    Error err(ErrorKind::kTimeout, "round cap reached without global halt");
    err.round = trace_.rounds;
    throw err;
  }
}

void Engine::check_contact(NodeId u, NodeId w) {
  const std::uint64_t r = trace_.rounds;
  if (u == 0 || u > g_->n() || !g_->has_edge(u, w)) {
    Error err(ErrorKind::kIllegalContact,
              "node " + std::to_string(u) + " contacted non-neighbor " + std::to_string(w));
    err.round = r;
    err.node = u;
    throw err;
  }
  if (stamp_[u] == r) {
    Error err(ErrorKind::kIllegalContact,
              "node " + std::to_string(u) + " initiated two contacts in one round");
    err.round = r;
    err.node = u;
    throw err;
  }
  stamp_[u] = r;
}

void Engine::charge(NodeId sender, std::uint64_t bits) {
  if (bits > budget_bits_) {
    Error err(ErrorKind::kBudgetExceeded, "message of " + std::to_string(bits) +
                                              " bits from node " + std::to_string(sender) +
                                              " exceeds budget " + std::to_string(budget_bits_));
    err.round = trace_.rounds;
    err.node = sender;
    err.size = bits;
    throw err;
  }
  trace_.total_bits += bits;
  trace_.max_message_bits = std::max(trace_.max_message_bits, bits);
}

std::string trace_json(const Trace& t) {
  nlohmann::json j;
  j["rounds"] = t.rounds;
  j["messages"] = t.messages;
  j["bits"] = t.total_bits;
  j["max_message_bits"] = t.max_message_bits;
  auto phases = nlohmann::json::array();
  for (const auto& p : t.phases) phases.push_back({{"round", p.round}, {"label", p.label}});
  j["phases"] = std::move(phases);
  j["seed"] = t.seed;
  if (!t.outputs.empty())
    j["outputs"] = std::vector<std::uint64_t>(t.outputs.begin() + 1, t.outputs.end());
  return j.dump();
}

void append_trace(Trace& into, const Trace& more) {
  for (PhaseMark m : more.phases) {
    m.round += into.rounds;
    into.phases.push_back(std::move(m));
  }
  into.rounds += more.rounds;
  into.messages += more.messages;
  into.total_bits += more.total_bits;
  into.max_message_bits = std::max(into.max_message_bits, more.max_message_bits);
  into.outputs = more.outputs;
}

ArcGraph ArcGraph::from_edges(std::uint32_t n,
                              const std::vector<std::pair<NodeId, NodeId>>& edges) {
  ArcGraph h;
  h.n_ = n;
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    if (a == 0 || b == 0 || a > n || b > n || a == b)
      throw Error(ErrorKind::kInvalidParameters, "bad subgraph edge");
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  std::sort(arcs.begin(), arcs.end());
  if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end())
    throw Error(ErrorKind::kInvalidParameters, "parallel subgraph edge");
  h.off_.assign(n + 2, 0);
  for (const auto& a : arcs) ++h.off_[a.first + 1];
  for (NodeId v = 1; v <= n; ++v) h.off_[v + 1] += h.off_[v];
  h.head_.resize(arcs.size());
  h.tail_.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    h.tail_[i] = arcs[i].first;
    h.head_[i] = arcs[i].second;
  }
  h.rev_.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i)
    h.rev_[i] = static_cast<std::size_t>(h.arc(h.head_[i], h.tail_[i]));
  return h;
}

std::int64_t ArcGraph::arc(NodeId v, NodeId u) const {
  if (v == 0 || v > n_) return -1;
  auto first = head_.begin() + static_cast<std::ptrdiff_t>(off_[v]);
  auto last = head_.begin() + static_cast<std::ptrdiff_t>(off_[v + 1]);
  auto it = std::lower_bound(first, last, u);
  if (it == last || *it != u) return -1;
  return it - head_.begin();
}

std::vector<std::pair<NodeId, NodeId>> ArcGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t a = 0; a < head_.size(); ++a)
    if (tail_[a] < head_[a]) out.emplace_back(tail_[a], head_[a]);
  return out;
}

std::vector<char> cover_ownership(const ArcGraph& h, const std::vector<char>& cover) {
  std::vector<char> owned(h.arcs(), 0);
  for (std::size_t a = 0; a < h.arcs(); ++a) {
    const NodeId v = h.tail(a), u = h.head(a);
    const bool cv = cover[v] != 0, cu = cover[u] != 0;
    if (!cv && !cu)
      throw Error(ErrorKind::kCoverViolation, "edge {" + std::to_string(std::min(u, v)) + "," +
                                                  std::to_string(std::max(u, v)) +
                                                  "} has no cover endpoint");
    owned[a] = cv && (!cu || v < u);
  }
  return owned;
}

CongestSimulator::CongestSimulator(const Graph& g, const ArcGraph& h, std::vector<char> owned,
                                   std::uint32_t delta)
    : h_(&h), owned_(std::move(owned)), delta_(delta) {
  const std::uint32_t n = h.n();
  if (n != g.n()) throw Error(ErrorKind::kInvalidParameters, "subgraph node count differs");
  for (NodeId v = 1; v <= n; ++v) {
    std::uint32_t k = 0;
    for (std::size_t a = h.begin(v); a < h.end(v); ++a) {
      const bool mine = owned_[a] != 0, theirs = owned_[h.rev(a)] != 0;
      if (mine == theirs && v < h.head(a))
        throw Error(ErrorKind::kCoverViolation,
                    "edge {" + std::to_string(v) + "," + std::to_string(h.head(a)) +
                        "} needs exactly one driving endpoint");
      k += mine;
    }
    if (k > delta)
      throw Error(ErrorKind::kDegreeViolation, "node " + std::to_string(v) + " drives " +
                                                   std::to_string(k) + " edges, threshold " +
                                                   std::to_string(delta));
    longest_ = std::max(longest_, k);
  }
  for (std::size_t a = 0; a < h.arcs(); ++a)
    if (owned_[a]) pairs_.emplace_back(a, h.rev(a));
  for (std::size_t a = 0; a < h.arcs(); ++a)
    if (owned_[a] && !g.has_edge(h.tail(a), h.head(a))) {
      Error err(ErrorKind::kIllegalContact, "node " + std::to_string(h.tail(a)) +
                                                " drives non-edge to " + std::to_string(h.head(a)));
      err.node = h.tail(a);
      throw err;
    }
}

std::uint64_t CongestSimulator::run(Engine& e, const std::vector<MaybeMsg>& out,
                                    std::vector<MaybeMsg>& in) const {
  const ArcGraph& h = *h_;
  // Every arc is overwritten below: each edge has exactly one owned arc.
  in.resize(h.arcs());
  // Every owner walks its owned arcs in neighbor order, one per round; no
  // node initiates twice in a round and the exchanges are independent, so
  // they are delivered in bulk and charged as the delta rounds they span.
  const std::uint64_t budget = e.budget_bits();
  std::uint64_t bits = 0, max_bits = 0;
  for (const auto& [a, back] : pairs_) {
    const MaybeMsg& x = out[a];
    const MaybeMsg& y = out[back];
    const std::uint64_t bx = 1 + (x ? x->bits : 0), by = 1 + (y ? y->bits : 0);
    if (std::max(bx, by) > budget) {
      const bool first = bx > budget;
      Error err(ErrorKind::kBudgetExceeded,
                "message of " + std::to_string(first ? bx : by) + " bits from node " +
                    std::to_string(first ? h.tail(a) : h.head(a)) + " exceeds budget " +
                    std::to_string(budget));
      err.round = e.round();
      err.node = first ? h.tail(a) : h.head(a);
      err.size = first ? bx : by;
      throw err;
    }
    bits += bx + by;
    max_bits = std::max(max_bits, std::max(bx, by));
    in[back] = x;
    in[a] = y;
  }
  const std::uint64_t messages = 2 * pairs_.size();
  if (longest_ > 0)
    e.fast_forward(delta_, messages, bits, max_bits);
  else
    e.idle(delta_);
  return delta_;
}

std::uint64_t simulate_congest_round_oriented(Engine& e, const ArcGraph& h,
                                              const std::vector<char>& owned, std::uint32_t delta,
                                              const std::vector<MaybeMsg>& out,
                                              std::vector<MaybeMsg>& in) {
  return CongestSimulator(e.graph(), h, owned, delta).run(e, out, in);
}

std::vector<char> cover_owned_arcs(const ArcGraph& h, const std::vector<char>& cover,
                                   std::uint32_t delta_th) {
  auto owned = cover_ownership(h, cover);
  for (NodeId v = 1; v <= h.n(); ++v)
    if (cover[v] && h.degree(v) > delta_th)
      throw Error(ErrorKind::kDegreeViolation, "cover node " + std::to_string(v) +
                                                   " has degree " + std::to_string(h.degree(v)) +
                                                   " above threshold " + std::to_string(delta_th));
  return owned;
}

std::uint64_t simulate_congest_round(Engine& e, const ArcGraph& h, const std::vector<char>& cover,
                                     std::uint32_t delta_th, const std::vector<MaybeMsg>& out,
                                     std::vector<MaybeMsg>& in) {
  return simulate_congest_round_oriented(e, h, cover_owned_arcs(h, cover, delta_th), delta_th, out,
                                         in);
}

}  // namespace gossip
