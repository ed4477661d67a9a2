#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gossip/common.hpp"
#include "gossip/graph.hpp"

namespace gossip {

struct Budget {
  std::uint32_t c_b = 64;
  // c_B * ceil(log2 N)^2
  std::uint64_t max_bits(std::uint64_t id_bound) const {
    const std::uint64_t l = ceil_log2(id_bound);
    return c_b * l * l;
  }
};

inline constexpr std::uint64_t kDefaultMaxRounds = 1'000'000;

struct PhaseMark {
  std::uint64_t round = 0;
  std::string label;
  friend bool operator==(const PhaseMark&, const PhaseMark&) = default;
};

struct Trace {
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_message_bits = 0;
  std::vector<PhaseMark> phases;
  std::uint64_t seed = 0;
  // Per-node output, indexed by node ID (slot 0 unused). Empty if the
  // protocol has none.
  std::vector<std::uint64_t> outputs;

  friend bool operator==(const Trace&, const Trace&) = default;
};

std::string trace_json(const Trace& t);

// Appends a later run: counters add up, phase marks shift by into.rounds.
// Outputs are taken from `more`.
void append_trace(Trace& into, const Trace& more);

class Engine;

// Per-contact protocol interface driven by Engine::execute. Each round:
// choose_contacts fills (initiator, target) pairs; payloads are read for
// every contact before any exchange is delivered; then each target answers
// every contacter; then replies are delivered and local_step runs.
template <class P>
concept Protocol = requires(P p, Engine& e, std::uint64_t r,
                            std::vector<std::pair<NodeId, NodeId>>& contacts, NodeId a,
                            const typename P::Msg& m, const typename P::Reply& rep) {
  { p.choose_contacts(e, r, contacts) };
  { p.payload(a, a) } -> std::convertible_to<typename P::Msg>;
  { p.on_exchange(a, a, m) } -> std::convertible_to<typename P::Reply>;
  { p.on_reply(a, a, rep) };
  { p.local_step(e, r) };
  { p.halted() } -> std::convertible_to<bool>;
  { m.bits() } -> std::convertible_to<std::uint64_t>;
  { rep.bits() } -> std::convertible_to<std::uint64_t>;
};

class Engine {
 public:
  Engine(const Graph& g, Budget budget = {}, std::uint64_t max_rounds = kDefaultMaxRounds,
         std::uint64_t seed = 0);

  const Graph& graph() const { return *g_; }
  std::uint64_t round() const { return trace_.rounds; }
  std::uint64_t budget_bits() const { return budget_bits_; }
  std::uint64_t max_rounds() const { return max_rounds_; }
  std::uint64_t seed() const { return trace_.seed; }

  // Private randomness of node v.
  SplitMix64& rng(NodeId v) { return rngs_[v]; }

  void mark(std::string label) { trace_.phases.push_back({trace_.rounds, std::move(label)}); }

  // k rounds in which no node initiates a contact.
  void idle(std::uint64_t k);

  // k rounds whose exchanges provably change no state (e.g. gossip while no
  // node holds a rumor). Skipped, but charged as `contacts` contacts per
  // round with `bits` bits each way.
  void silent(std::uint64_t k, std::uint64_t contacts, std::uint64_t bits);

  // k rounds that repeat an already executed, state-preserving stretch;
  // messages and bits are the totals for all k rounds.
  void fast_forward(std::uint64_t k, std::uint64_t messages, std::uint64_t bits,
                    std::uint64_t max_message_bits);

  // Runs up to `rounds` rounds, stopping early once proto.halted().
  // Returns the number of rounds executed.
  template <Protocol P>
  std::uint64_t execute(P& proto, std::uint64_t rounds);

  template <Protocol P>
  void step(P& proto);

  const Trace& trace() const { return trace_; }
  Trace& trace() { return trace_; }

 private:
  void begin_round();
  void check_contact(NodeId u, NodeId w);
  void charge(NodeId sender, std::uint64_t bits);

  const Graph* g_;
  std::uint64_t budget_bits_;
  std::uint64_t max_rounds_;
  Trace trace_;
  std::vector<SplitMix64> rngs_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::pair<NodeId, NodeId>> contacts_;
};

template <Protocol P>
void Engine::step(P& proto) {
  begin_round();
  const std::uint64_t r = trace_.rounds;
  contacts_.clear();
  proto.choose_contacts(*this, r, contacts_);
  for (const auto& [u, w] : contacts_) check_contact(u, w);
  std::vector<typename P::Msg> msgs;
  msgs.reserve(contacts_.size());
  for (const auto& [u, w] : contacts_) {
    msgs.push_back(proto.payload(u, w));
    charge(u, msgs.back().bits());
  }
  std::vector<typename P::Reply> replies;
  replies.reserve(contacts_.size());
  for (std::size_t i = 0; i < contacts_.size(); ++i) {
    const auto [u, w] = contacts_[i];
    replies.push_back(proto.on_exchange(w, u, msgs[i]));
    charge(w, replies.back().bits());
  }
  for (std::size_t i = 0; i < contacts_.size(); ++i)
    proto.on_reply(contacts_[i].first, contacts_[i].second, replies[i]);
  trace_.messages += 2 * contacts_.size();
  proto.local_step(*this, r);
  ++trace_.rounds;
}

template <Protocol P>
std::uint64_t Engine::execute(P& proto, std::uint64_t rounds) {
  std::uint64_t done = 0;
  while (done < rounds && !proto.halted()) {
    step(proto);
    ++done;
  }
  return done;
}

// Runs proto until it halts; outputs are collected if P provides output(v).
template <Protocol P>
Trace run(const Graph& g, P& proto, Budget budget = {},
          std::uint64_t max_rounds = kDefaultMaxRounds, std::uint64_t seed = 0) {
  Engine e(g, budget, max_rounds, seed);
  if constexpr (requires { proto.init(e); }) proto.init(e);
  while (!proto.halted()) e.step(proto);
  Trace t = e.trace();
  if constexpr (requires(NodeId v) { proto.output(v); }) {
    t.outputs.assign(g.n() + 1, 0);
    for (NodeId v = 1; v <= g.n(); ++v) t.outputs[v] = proto.output(v);
  }
  return t;
}

// ---- CONGEST simulation over a vertex cover ----

// One CONGEST message: up to three words, with an explicit bit length.
struct CongestMsg {
  std::array<std::uint64_t, 3> w{};
  std::uint32_t bits = 0;
  friend bool operator==(const CongestMsg&, const CongestMsg&) = default;
};
using MaybeMsg = std::optional<CongestMsg>;

// Undirected subgraph g' of the engine graph as CSR arcs. Arc a = (v -> u)
// sits in v's row; rev(a) is (u -> v).
class ArcGraph {
 public:
  ArcGraph() = default;
  static ArcGraph from_edges(std::uint32_t n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::uint32_t n() const { return n_; }
  std::size_t arcs() const { return head_.size(); }
  std::size_t begin(NodeId v) const { return off_[v]; }
  std::size_t end(NodeId v) const { return off_[v + 1]; }
  std::uint32_t degree(NodeId v) const { return static_cast<std::uint32_t>(off_[v + 1] - off_[v]); }
  NodeId head(std::size_t a) const { return head_[a]; }
  NodeId tail(std::size_t a) const { return tail_[a]; }
  std::size_t rev(std::size_t a) const { return rev_[a]; }
  // Arc v -> u, or -1 if absent.
  std::int64_t arc(NodeId v, NodeId u) const;
  std::vector<std::pair<NodeId, NodeId>> edges() const;


 private:
  std::uint32_t n_ = 0;
  std::vector<std::size_t> off_{0, 0};
  std::vector<NodeId> head_;
  std::vector<NodeId> tail_;
  std::vector<std::size_t> rev_;
};

// out[a] is what tail(a) sends to head(a); after the call in[a] holds what
// tail(a) received from head(a), i.e. in[rev(a)] = out[a].
// Each edge is driven by its cover endpoint (the lower ID if both are in the
// cover), one owned edge per engine round in neighbor-ID order. Always
// consumes exactly delta_th engine rounds.
std::uint64_t simulate_congest_round(Engine& e, const ArcGraph& h, const std::vector<char>& cover,
                                     std::uint32_t delta_th, const std::vector<MaybeMsg>& out,
                                     std::vector<MaybeMsg>& in);

// Same, with explicit ownership: owned[a] means tail(a) drives the edge of
// arc a. Every edge needs exactly one owned arc; owned out-degree must not
// exceed delta.
std::uint64_t simulate_congest_round_oriented(Engine& e, const ArcGraph& h,
                                              const std::vector<char>& owned, std::uint32_t delta,
                                              const std::vector<MaybeMsg>& out,
                                              std::vector<MaybeMsg>& in);

// Ownership induced by a vertex cover; throws cover-violation.
std::vector<char> cover_ownership(const ArcGraph& h, const std::vector<char>& cover);

// Same, and checks that no cover node exceeds delta_th (degree-violation).
std::vector<char> cover_owned_arcs(const ArcGraph& h, const std::vector<char>& cover,
                                   std::uint32_t delta_th);

// Validates a fixed ownership once, then simulates any number of rounds.
class CongestSimulator {
 public:
  CongestSimulator(const Graph& g, const ArcGraph& h, std::vector<char> owned, std::uint32_t delta);
  std::uint64_t run(Engine& e, const std::vector<MaybeMsg>& out, std::vector<MaybeMsg>& in) const;

 private:
  const ArcGraph* h_;
  std::vector<char> owned_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;  // (owned arc, its reverse)
  std::uint32_t delta_;
  std::uint32_t longest_ = 0;
};

}  // namespace gossip
