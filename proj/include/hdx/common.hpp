#ifndef HDX_COMMON_HPP
#define HDX_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hdx {

/// One alphabet code. Input symbols live below kFirstReserved; the range
/// above it holds dictionary counters, the entry separator and the sentinel.
using Symbol = std::uint32_t;

inline constexpr Symbol kFirstReserved = 0x80000000u;
inline constexpr Symbol kSeparator = 0xFFFFFFFEu;
inline constexpr Symbol kSentinel = 0xFFFFFFFFu;

/// Image value standing for "undefined" in function inversion.
inline constexpr std::uint32_t kBot = 0xFFFFFFFFu;

enum class ErrorCode {
  EmptyText,
  KOutOfRange,
  ReservedSymbolInInput,
  AlterationPastEnd,
  TooManyAlterations,
  LcpAtEnd,
  EntryTooLong,
  RadiusOutOfRange,
  SentinelInQuery,
  EmptyQuery,
  BotQuery,
  InvalidArgument,
  CorruptIndex,
  UnsupportedVersion,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// splitmix64 finalizer; used for seed derivation and the cluster hashes.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

/// ceil(log2(n)) for n >= 1.
constexpr std::uint32_t ceil_log2(std::uint64_t n) {
  std::uint32_t r = 0;
  while ((std::uint64_t{1} << r) < n) ++r;
  return r;
}

/// floor(log2(n)) for n >= 1.
constexpr std::uint32_t floor_log2(std::uint64_t n) {
  std::uint32_t r = 0;
  while (n >>= 1) ++r;
  return r;
}

}  // namespace hdx

#endif  // HDX_COMMON_HPP
