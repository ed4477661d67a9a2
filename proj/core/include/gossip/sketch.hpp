#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gossip/common.hpp"

namespace gossip {

// Fingerprints live in Z_p with p = 2^61 - 1.
inline constexpr std::uint64_t kSketchPrime = (1ULL << 61) - 1;

struct SketchParams {
  std::uint64_t seed = 0;      // shared randomness, fresh per sampling round
  std::uint64_t id_bound = 4;  // N
  std::uint32_t reps = 1;

  std::uint32_t levels() const;  // ceil(log2 C(N,2))
  std::uint32_t count_bits() const { return 2 * ceil_log2(id_bound) + 1; }
  std::uint32_t index_bits() const;
  static constexpr std::uint32_t check_bits() { return 61; }
  std::uint64_t rep_bits() const;
  std::uint64_t total_bits() const { return rep_bits() * reps; }

  friend bool operator==(const SketchParams&, const SketchParams&) = default;
};

// reps = ceil(log2(1/delta)).
std::uint32_t reps_for_failure(double delta);
// reps for failure probability 1/n^3.
std::uint32_t reps_for_nodes(std::uint32_t n);

std::uint64_t edge_index(NodeId u, NodeId v, std::uint64_t id_bound);

// Edge filter; an empty function keeps every edge.
using EdgeKeep = std::function<bool(NodeId, NodeId)>;

// Linear sketch of a node set's signed incidence vector. Each edge lands in
// exactly one level per repetition; the nested level-l set is the suffix
// sum over levels >= l.
class Sketch {
 public:
  struct Cell {
    std::uint64_t count = 0;      // signed, mod 2^64
    std::uint64_t index_sum = 0;  // signed, mod 2^64
    std::uint64_t check = 0;      // mod p
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  Sketch() = default;
  explicit Sketch(const SketchParams& params, std::uint64_t tag = 0);

  const SketchParams& params() const { return params_; }
  std::uint64_t tag() const { return tag_; }
  bool empty_shape() const { return cells_.empty(); }

  // Adds edge {v, u} as seen from endpoint v.
  void add_incident(NodeId v, NodeId u);

  void merge(const Sketch& other);
  // Merges repetitions [first, last) only.
  void merge_reps(const Sketch& other, std::uint32_t first, std::uint32_t last);

  bool is_zero() const;
  std::optional<std::pair<NodeId, NodeId>> sample() const;
  std::optional<std::pair<NodeId, NodeId>> sample_rep(std::uint32_t rep) const;

  std::uint64_t packed_bits() const { return params_.total_bits(); }
  std::vector<std::uint64_t> pack() const;
  static Sketch unpack(std::span<const std::uint64_t> words, const SketchParams& params,
                       std::uint64_t tag = 0);

  const Cell& cell(std::uint32_t rep, std::uint32_t level) const {
    return cells_[static_cast<std::size_t>(rep) * levels_ + level];
  }

  friend bool operator==(const Sketch&, const Sketch&) = default;

 private:
  SketchParams params_;
  std::uint64_t tag_ = 0;
  std::uint32_t levels_ = 0;
  std::uint64_t fp_seed_ = 0;
  std::vector<std::uint64_t> rep_seeds_;
  std::vector<Cell> cells_;
};

Sketch node_sketch(NodeId v, std::span<const NodeId> neighbors, const EdgeKeep& keep,
                   const SketchParams& params, std::uint64_t tag = 0);
Sketch merge(const Sketch& a, const Sketch& b);
inline std::optional<std::pair<NodeId, NodeId>> sample_cut_edge(const Sketch& s) {
  return s.sample();
}

}  // namespace gossip
