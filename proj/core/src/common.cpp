#include "gossip/common.hpp"

#include <bit>

namespace gossip {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameters: return "invalid-parameters";
    case ErrorKind::kDisconnectedSample: return "disconnected-sample";
    case ErrorKind::kTooLarge: return "too-large";
    case ErrorKind::kParseError: return "parse-error";
    case ErrorKind::kDisconnectedInput: return "disconnected-input";
    case ErrorKind::kIdOutOfRange: return "id-out-of-range";
    case ErrorKind::kParamsMismatch: return "params-mismatch";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kIllegalContact: return "illegal-contact";
    case ErrorKind::kTimeout: return "timeout";
    case ErrorKind::kCoverViolation: return "cover-violation";
    case ErrorKind::kDegreeViolation: return "degree-violation";
    case ErrorKind::kPhaseOverrun: return "phase-overrun";
    case ErrorKind::kMergeStall: return "merge-stall";
    case ErrorKind::kResponsibilityViolation: return "responsibility-violation";
    case ErrorKind::kPreconditionUnverified: return "precondition-unverified";
    case ErrorKind::kSpreadIncomplete: return "spread-incomplete";
    case ErrorKind::kWidthOverflow: return "width-overflow";
    case ErrorKind::kDuplicateWeights: return "duplicate-weights";
    case ErrorKind::kBackboneMissing: return "backbone-missing";
    case ErrorKind::kConfigInvalid: return "config-invalid";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + mix64(stream + 0x3c6ef372fe94f82bULL));
}

std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = rng();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint32_t bits_for(std::uint64_t x) {
  return x == 0 ? 1 : static_cast<std::uint32_t>(std::bit_width(x));
}

std::uint32_t ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return static_cast<std::uint32_t>(std::bit_width(x - 1));
}

}  // namespace gossip
