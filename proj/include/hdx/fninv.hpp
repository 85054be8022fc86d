#ifndef HDX_FNINV_HPP
#define HDX_FNINV_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hdx/common.hpp"

namespace hdx {

/// f: [0, n) -> [0, n) or kBot.
using Evaluator = std::function<std::uint32_t(std::uint32_t)>;

enum class Execution : std::uint8_t { Serial, Parallel };

inline constexpr std::uint32_t kDefaultClusterCap = 64;

struct InversionParams {
  std::uint32_t n = 1;
  std::uint32_t sigma = 1;
  std::uint32_t chain_length = 1;  // L applications of h per chain
  std::uint32_t clusters = 1;
  std::uint32_t starts_per_cluster = 1;
  std::uint64_t seed = 0;

  /// L = ceil(sigma log2(sigma+1)), C = min(ceil(sigma^2 log2(sigma+2)^3), cap),
  /// starts = max(1, ceil(n / L^3)).
  static InversionParams defaults(std::uint32_t n, std::uint32_t sigma,
                                  std::uint32_t cluster_cap = kDefaultClusterCap,
                                  std::uint64_t seed = 0);
};

/// g_c: [0, 2n) -> [0, n).
inline std::uint32_t g_hash(std::uint64_t cluster_seed, std::uint64_t x, std::uint32_t n) {
  return static_cast<std::uint32_t>(mix64(cluster_seed ^ mix64(x)) % n);
}

struct Cluster {
  std::uint64_t seed = 0;
  /// (end, start) pairs sorted by end; one start per end.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ends;

  std::optional<std::uint32_t> lookup(std::uint32_t end) const;
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// h_c(i) = g_c(f(i)), or g_c(n + i) when f(i) is undefined.
std::uint32_t h_step(const Cluster& c, std::uint32_t i, const Evaluator& f, std::uint32_t n);

/// Preimage elements the chains do not recover, grouped by image.
struct MissingDict {
  std::vector<std::uint32_t> keys;     // sorted images
  std::vector<std::uint32_t> offsets;  // keys.size() + 1 bounds into items
  std::vector<std::uint32_t> items;

  std::span<const std::uint32_t> find(std::uint32_t j) const;
  std::size_t entries() const { return items.size(); }
  friend bool operator==(const MissingDict&, const MissingDict&) = default;
};

class InversionIndex {
 public:
  InversionParams params;
  std::vector<Cluster> clusters;
  MissingDict missing;

  /// Exact preimage of j, sorted. Throws BotQuery for j == kBot.
  std::vector<std::uint32_t> invert(std::uint32_t j, const Evaluator& f) const;
  /// Chain recovery only, sorted and deduplicated.
  std::vector<std::uint32_t> invert_chains_only(std::uint32_t j, const Evaluator& f) const;

  /// Stored dictionary entries: chain ends plus missing items.
  std::size_t dictionary_entries() const;
};

std::vector<Cluster> build_clusters(const Evaluator& f, const InversionParams& params,
                                    Execution exec = Execution::Parallel);

/// Certifies every image by replaying the real chain query and stores what it misses.
MissingDict build_missing(const Evaluator& f, std::span<const Cluster> clusters,
                          const InversionParams& params, Execution exec = Execution::Parallel);

InversionIndex build_inversion(const Evaluator& f, const InversionParams& params,
                               Execution exec = Execution::Parallel);

}  // namespace hdx

#endif  // HDX_FNINV_HPP
