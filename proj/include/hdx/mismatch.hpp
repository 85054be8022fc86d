#ifndef HDX_MISMATCH_HPP
#define HDX_MISMATCH_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hdx/common.hpp"
#include "hdx/text.hpp"

namespace hdx {

/// Suffix array + Kasai LCP + sparse-table RMQ: O(1) LCP of two text suffixes.
class ExactLcpBackend {
 public:
  ExactLcpBackend() = default;
  explicit ExactLcpBackend(std::span<const Symbol> text);

  std::uint32_t lcp(std::uint32_t a, std::uint32_t b) const;

  std::span<const std::uint32_t> suffix_array() const { return sa_; }
  std::span<const std::uint32_t> ranks() const { return rank_; }
  std::span<const std::uint32_t> lcp_array() const { return lcp_; }

 private:
  std::uint32_t range_min(std::uint32_t lo, std::uint32_t hi) const;  // inclusive

  std::vector<std::uint32_t> sa_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> lcp_;  // lcp_[r] = LCP(sa_[r-1], sa_[r])
  std::vector<std::vector<std::uint32_t>> table_;
  std::uint32_t size_ = 0;
};

/// Karp-Rabin fingerprints modulo 2^61-1, sampled every tau positions. Two
/// independent bases: the first drives the search, the second re-derives it.
class FingerprintLcpBackend {
 public:
  static constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;

  FingerprintLcpBackend() = default;
  FingerprintLcpBackend(std::span<const Symbol> text, std::uint32_t tau, std::uint64_t seed);

  /// Test hook: fixes the bases instead of drawing them from a seed.
  FingerprintLcpBackend(std::span<const Symbol> text, std::uint32_t tau, std::uint64_t base1,
                        std::uint64_t base2);

  std::uint32_t tau() const { return tau_; }
  std::size_t stored_fingerprints() const { return samples_[0].size(); }
  std::uint64_t base(int which) const { return base_[which]; }

  /// Fingerprint of text[0, x), rebuilt from the nearest sample (<= tau reads).
  std::uint64_t prefix(std::uint32_t x, int which) const;
  /// base^len.
  std::uint64_t power(std::uint32_t len, int which) const;

  static std::uint64_t mul(std::uint64_t a, std::uint64_t b);
  static std::uint64_t add(std::uint64_t a, std::uint64_t b);
  static std::uint64_t sub(std::uint64_t a, std::uint64_t b);
  static std::uint64_t code(Symbol s) { return std::uint64_t{s} + 1; }

 private:
  void build(std::span<const Symbol> text);

  std::span<const Symbol> text_;
  std::uint32_t tau_ = 1;
  std::array<std::uint64_t, 2> base_{};
  std::array<std::vector<std::uint64_t>, 2> samples_;     // F[t * tau]
  std::array<std::vector<std::uint64_t>, 2> pow_block_;   // base^(t * tau)
  std::array<std::vector<std::uint64_t>, 2> pow_small_;   // base^r, r < tau
};

/// Per-query state: the query symbols and their prefix fingerprints.
class QueryContext {
 public:
  std::span<const Symbol> query() const { return query_; }

 private:
  friend class MismatchOracle;
  std::vector<Symbol> query_;
  std::array<std::vector<std::uint64_t>, 2> prefix_;
};

inline constexpr std::uint32_t kMaxMismatchLimit = 32;

struct MismatchList {
  std::array<std::uint32_t, kMaxMismatchLimit> positions{};
  std::uint32_t count = 0;
  /// True iff fewer than `limit` mismatches exist in the overlap.
  bool exhausted = true;
  std::uint32_t overlap = 0;
  std::uint32_t lcp_calls = 0;

  std::span<const std::uint32_t> view() const { return std::span(positions).first(count); }
};

enum class LcpMode : std::uint8_t { Linear = 0, Succinct = 1 };

/// First-k+1-mismatches structure over a padded text. Text-vs-text LCPs use
/// the suffix array (linear mode) or sampled fingerprints (succinct mode);
/// text-vs-query LCPs always use fingerprints, verified when paranoid.
class MismatchOracle {
 public:
  MismatchOracle(const PaddedText& text, LcpMode mode, std::uint32_t tau, std::uint64_t seed,
                 bool paranoid = true);

  /// Test hook: succinct/linear oracle with explicit fingerprint bases.
  MismatchOracle(const PaddedText& text, LcpMode mode, std::uint32_t tau, std::uint64_t base1,
                 std::uint64_t base2, bool paranoid);

  MismatchOracle(const MismatchOracle&) = delete;
  MismatchOracle& operator=(const MismatchOracle&) = delete;

  const PaddedText& text() const { return *text_; }
  LcpMode mode() const { return mode_; }
  std::uint32_t tau() const { return fingerprints_.tau(); }
  bool paranoid() const { return paranoid_; }
  const FingerprintLcpBackend& fingerprints() const { return fingerprints_; }
  /// Empty in succinct mode.
  const ExactLcpBackend& exact() const { return exact_; }

  /// Throws EmptyQuery or SentinelInQuery.
  QueryContext init_query(std::span<const Symbol> q) const;

  StringView view(const QueryContext* ctx = nullptr) const {
    return ctx ? StringView(*text_, ctx->query()) : StringView(*text_);
  }

  /// LCP of the unaltered bases of a and b, each advanced by `shift`.
  std::uint32_t raw_lcp(const AlteredString& a, const AlteredString& b, std::uint32_t shift,
                        const QueryContext* ctx) const;

  MismatchList first_mismatches(const AlteredString& a, const AlteredString& b,
                                std::uint32_t limit, const QueryContext* ctx = nullptr) const;

  std::uint32_t lcp_altered(const AlteredString& a, const AlteredString& b,
                            const QueryContext* ctx = nullptr) const;

  /// Distance when d_H(a, b) <= r, nullopt otherwise.
  std::optional<std::uint32_t> within_distance(const AlteredString& a, const AlteredString& b,
                                               std::uint32_t r,
                                               const QueryContext* ctx = nullptr) const;

  /// Sign of the lexicographic comparison; `lcp_out` receives LCP(a, b).
  int compare(const AlteredString& a, const AlteredString& b, const QueryContext* ctx,
              std::uint32_t* lcp_out = nullptr) const;

  /// Paranoid-mode detections (each one was repaired by a direct scan).
  std::uint64_t fingerprint_faults() const { return faults_.load(std::memory_order_relaxed); }

 private:
  std::uint32_t lcp_text_text(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t lcp_text_query(std::uint32_t a, std::uint32_t b, const QueryContext& ctx) const;

  const PaddedText* text_;
  LcpMode mode_;
  bool paranoid_;
  ExactLcpBackend exact_;
  FingerprintLcpBackend fingerprints_;
  mutable std::atomic<std::uint64_t> faults_{0};
};

}  // namespace hdx

#endif  // HDX_MISMATCH_HPP
