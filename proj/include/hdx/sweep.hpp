#ifndef HDX_SWEEP_HPP
#define HDX_SWEEP_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdx/engine.hpp"

namespace hdx {

/// 3^k * C(ceil(log2 n) + 1, k): cap on nodes visited outside DFS with radius > 0.
std::uint64_t query_subtree_bound(std::uint32_t n, std::uint32_t k);

struct QuerySpec {
  std::vector<Symbol> pattern;
  std::uint32_t r = 0;
};

/// A substring of `text` (length mostly 4..30) with up to r symbols replaced
/// by draws from `alphabet`; r uniform in [0, k].
QuerySpec random_query(std::span<const Symbol> text, std::span<const Symbol> alphabet,
                       std::uint32_t k, std::mt19937_64& rng);

struct SweepConfig {
  std::vector<std::uint32_t> ks{1, 2};
  std::vector<std::uint32_t> sigmas{1, 4, 16};
  std::uint32_t queries = 100;
  std::uint64_t seed = 1;
  LcpMode mode = LcpMode::Linear;
  std::uint32_t tau = 1;
  std::uint32_t cluster_cap = kDefaultClusterCap;
  Execution exec = Execution::Parallel;
};

struct SweepRow {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t sigma = 0;
  std::size_t index_bytes = 0;
  std::size_t tree_bytes = 0;
  std::size_t inversion_bytes = 0;
  double build_seconds = 0;
  double mean_query_us = 0;
  double median_query_us = 0;
  double mean_leaf_list = 0;
  double mean_visited = 0;
  std::uint64_t max_visited = 0;
  std::uint64_t visited_bound = 0;
  std::uint64_t bound_violations = 0;
  std::uint64_t duplicates = 0;
  double mean_output = 0;
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t missing_entries = 0;
  std::vector<std::pair<std::string, std::size_t>> label_leaves;  // per path label
};

/// One row per (k, sigma), configurations in input order.
std::vector<SweepRow> run_sweep(std::span<const Symbol> text, const SweepConfig& config);

}  // namespace hdx

#endif  // HDX_SWEEP_HPP
