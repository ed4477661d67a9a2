#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gossip {

// Node IDs live in [1, N]; slot 0 of every per-node array is unused.
using NodeId = std::uint32_t;

enum class ErrorKind {
  kInvalidParameters,
  kDisconnectedSample,
  kTooLarge,
  kParseError,
  kDisconnectedInput,
  kIdOutOfRange,
  kParamsMismatch,
  kBudgetExceeded,
  kIllegalContact,
  kTimeout,
  kCoverViolation,
  kDegreeViolation,
  kPhaseOverrun,
  kMergeStall,
  kResponsibilityViolation,
  kPreconditionUnverified,
  kSpreadIncomplete,
  kWidthOverflow,
  kDuplicateWeights,
  kBackboneMissing,
  kConfigInvalid,
  kInsufficientData,
  kIo,
};

// Kebab-case label, e.g. "budget-exceeded".
const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const char* label() const noexcept { return to_string(kind_); }

  // Filled for budget-exceeded, illegal-contact and timeout.
  std::uint64_t round = 0;
  NodeId node = 0;
  std::uint64_t size = 0;

 private:
  ErrorKind kind_;
};

std::uint64_t mix64(std::uint64_t x);

// Splittable PRF: independent stream seed for (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// SplitMix64 stream. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Uniform integer in [0, bound). bound must be positive.
std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound);

// Uniform double in [0, 1).
double uniform01(SplitMix64& rng);

// Bits needed to write any value in [0, x].
std::uint32_t bits_for(std::uint64_t x);

// ceil(log2(x)) for x >= 1.
std::uint32_t ceil_log2(std::uint64_t x);

}  // namespace gossip
