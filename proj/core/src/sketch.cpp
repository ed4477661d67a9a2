#include "gossip/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace gossip {

namespace {

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;  // both < 2^61, no overflow
  return s >= kSketchPrime ? s - kSketchPrime : s;
}

std::uint64_t neg_mod(std::uint64_t a) { return a == 0 ? 0 : kSketchPrime - a; }

class BitWriter {
 public:
  void put(std::uint64_t value, std::uint32_t width) {
    if (width < 64) value &= (1ULL << width) - 1;
    const std::uint32_t off = pos_ % 64;
    if (off == 0) words_.push_back(0);
    words_.back() |= value << off;
    if (off + width > 64) words_.push_back(value >> (64 - off));
    pos_ += width;
  }
  std::vector<std::uint64_t> take() { return std::move(words_); }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t pos_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint64_t> words) : words_(words) {}
  std::uint64_t get(std::uint32_t width) {
    const std::size_t w = pos_ / 64;
    const std::uint32_t off = pos_ % 64;
    if (w >= words_.size()) throw Error(ErrorKind::kParseError, "sketch encoding truncated");
    std::uint64_t value = words_[w] >> off;
    if (off + width > 64) {
      if (w + 1 >= words_.size())
        throw Error(ErrorKind::kParseError, "sketch encoding truncated");
      value |= words_[w + 1] << (64 - off);
    }
    if (width < 64) value &= (1ULL << width) - 1;
    pos_ += width;
    return value;
  }

 private:
  std::span<const std::uint64_t> words_;
  std::uint64_t pos_ = 0;
};

std::uint64_t sign_extend(std::uint64_t value, std::uint32_t width) {
  if (width >= 64) return value;
  const std::uint64_t top = 1ULL << (width - 1);
  return (value ^ top) - top;
}

}  // namespace

std::uint32_t SketchParams::levels() const {
  const auto n = static_cast<unsigned __int128>(id_bound);
  const unsigned __int128 pairs = n * (n - 1) / 2;
  std::uint32_t bits = 0;
  while ((static_cast<unsigned __int128>(1) << bits) < pairs) ++bits;
  return std::max<std::uint32_t>(bits, 1);
}

std::uint32_t SketchParams::index_bits() const {
  return std::min<std::uint32_t>(64, 4 * ceil_log2(id_bound) + 1);
}

std::uint64_t SketchParams::rep_bits() const {
  return static_cast<std::uint64_t>(levels()) *
         (count_bits() + index_bits() + check_bits());
}

std::uint32_t reps_for_failure(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorKind::kInvalidParameters, "sketch failure probability must be in (0,1)");
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(std::log2(1.0 / delta))));
}

std::uint32_t reps_for_nodes(std::uint32_t n) {
  return std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::ceil(3.0 * std::log2(std::max<std::uint32_t>(n, 2)))));
}

std::uint64_t edge_index(NodeId u, NodeId v, std::uint64_t id_bound) {
  if (u == 0 || v == 0 || u > id_bound || v > id_bound || u == v)
    throw Error(ErrorKind::kIdOutOfRange, "sketch edge endpoint outside [1, N]");
  const NodeId a = std::min(u, v), b = std::max(u, v);
  return static_cast<std::uint64_t>(a - 1) * id_bound + (b - 1);
}

Sketch::Sketch(const SketchParams& params, std::uint64_t tag)
    : params_(params), tag_(tag), levels_(params.levels()) {
  if (params.reps == 0) throw Error(ErrorKind::kInvalidParameters, "sketch needs reps >= 1");
  fp_seed_ = derive_seed(params.seed, 0);
  rep_seeds_.resize(params.reps);
  for (std::uint32_t r = 0; r < params.reps; ++r) rep_seeds_[r] = derive_seed(params.seed, r + 1);
  cells_.assign(static_cast<std::size_t>(params.reps) * levels_, Cell{});
}

void Sketch::add_incident(NodeId v, NodeId u) {
  const std::uint64_t idx = edge_index(v, u, params_.id_bound);
  const bool plus = v < u;
  const std::uint64_t fp = mix64(idx ^ fp_seed_) % kSketchPrime;
  const std::uint64_t dc = plus ? 1 : ~0ULL;
  const std::uint64_t di = plus ? idx : 0 - idx;
  const std::uint64_t dk = plus ? fp : neg_mod(fp);
  for (std::uint32_t r = 0; r < params_.reps; ++r) {
    const auto z = std::min<std::uint32_t>(
        levels_ - 1, static_cast<std::uint32_t>(std::countl_zero(mix64(idx + rep_seeds_[r]))));
    Cell& c = cells_[static_cast<std::size_t>(r) * levels_ + z];
    c.count += dc;
    c.index_sum += di;
    c.check = add_mod(c.check, dk);
  }
}

void Sketch::merge(const Sketch& other) { merge_reps(other, 0, params_.reps); }

void Sketch::merge_reps(const Sketch& other, std::uint32_t first, std::uint32_t last) {
  if (!(params_ == other.params_) || tag_ != other.tag_)
    throw Error(ErrorKind::kParamsMismatch, "sketches built under different params or filters");
  last = std::min(last, params_.reps);
  for (std::size_t i = static_cast<std::size_t>(first) * levels_;
       i < static_cast<std::size_t>(last) * levels_; ++i) {
    cells_[i].count += other.cells_[i].count;
    cells_[i].index_sum += other.cells_[i].index_sum;
    cells_[i].check = add_mod(cells_[i].check, other.cells_[i].check);
  }
}

bool Sketch::is_zero() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c == Cell{}; });
}

std::optional<std::pair<NodeId, NodeId>> Sketch::sample_rep(std::uint32_t rep) const {
  Cell acc;
  for (std::uint32_t l = levels_; l-- > 0;) {
    const Cell& c = cell(rep, l);
    acc.count += c.count;
    acc.index_sum += c.index_sum;
    acc.check = add_mod(acc.check, c.check);
    if (acc == Cell{}) continue;
    // First nonempty nested set; it must be 1-sparse to decode.
    const bool plus = acc.count == 1;
    if (!plus && acc.count != ~0ULL) return std::nullopt;
    const std::uint64_t idx = plus ? acc.index_sum : 0 - acc.index_sum;
    const std::uint64_t fp = mix64(idx ^ fp_seed_) % kSketchPrime;
    if ((plus ? fp : neg_mod(fp)) != acc.check) return std::nullopt;
    const std::uint64_t n = params_.id_bound;
    if (idx / n >= n) return std::nullopt;
    const auto a = static_cast<NodeId>(idx / n + 1), b = static_cast<NodeId>(idx % n + 1);
    if (a >= b) return std::nullopt;
    const auto z = std::min<std::uint32_t>(
        levels_ - 1, static_cast<std::uint32_t>(std::countl_zero(mix64(idx + rep_seeds_[rep]))));
    if (z != l) return std::nullopt;
    return std::make_pair(a, b);
  }
  return std::nullopt;
}

std::optional<std::pair<NodeId, NodeId>> Sketch::sample() const {
  for (std::uint32_t r = 0; r < params_.reps; ++r)
    if (auto e = sample_rep(r)) return e;
  return std::nullopt;
}

std::vector<std::uint64_t> Sketch::pack() const {
  BitWriter out;
  const auto cw = params_.count_bits(), iw = params_.index_bits();
  for (const Cell& c : cells_) {
    out.put(c.count, cw);
    out.put(c.index_sum, iw);
    out.put(c.check, SketchParams::check_bits());
  }
  return out.take();
}

Sketch Sketch::unpack(std::span<const std::uint64_t> words, const SketchParams& params,
                      std::uint64_t tag) {
  Sketch s(params, tag);
  BitReader in(words);
  const auto cw = params.count_bits(), iw = params.index_bits();
  for (Cell& c : s.cells_) {
    c.count = sign_extend(in.get(cw), cw);
    c.index_sum = sign_extend(in.get(iw), iw);
    c.check = in.get(SketchParams::check_bits());
    if (c.check >= kSketchPrime) throw Error(ErrorKind::kParseError, "sketch check out of range");
  }
  return s;
}

Sketch node_sketch(NodeId v, std::span<const NodeId> neighbors, const EdgeKeep& keep,
                   const SketchParams& params, std::uint64_t tag) {
  Sketch s(params, tag);
  for (NodeId u : neighbors)
    if (!keep || keep(v, u)) s.add_incident(v, u);
  return s;
}

Sketch merge(const Sketch& a, const Sketch& b) {
  Sketch out = a;
  out.merge(b);
  return out;
}

}  // namespace gossip
