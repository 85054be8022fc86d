#include "hdx/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <exception>

#include "hdx/persist.hpp"

namespace hdx {

std::uint64_t query_subtree_bound(std::uint32_t n, std::uint32_t k) {
  const std::uint64_t top = ceil_log2(n) + 1;
  if (k > top) return 0;
  std::uint64_t binom = 1;
  for (std::uint64_t i = 0; i < k; ++i) binom = binom * (top - i) / (i + 1);
  std::uint64_t pow3 = 1;
  for (std::uint32_t i = 0; i < k; ++i) pow3 *= 3;
  return pow3 * binom;
}

QuerySpec random_query(std::span<const Symbol> text, std::span<const Symbol> alphabet,
                       std::uint32_t k, std::mt19937_64& rng) {
  QuerySpec out;
  const auto n = static_cast<std::uint32_t>(text.size());
  std::uint32_t len;
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0)
    len = std::uniform_int_distribution<std::uint32_t>(1, std::min<std::uint32_t>(n, 64))(rng);
  else
    len = std::uniform_int_distribution<std::uint32_t>(std::min<std::uint32_t>(4, n),
                                                        std::min<std::uint32_t>(30, n))(rng);
  const std::uint32_t start = std::uniform_int_distribution<std::uint32_t>(0, n - len)(rng);
  out.pattern.assign(text.begin() + start, text.begin() + start + len);
  out.r = std::uniform_int_distribution<std::uint32_t>(0, k)(rng);
  const std::uint32_t edits = std::uniform_int_distribution<std::uint32_t>(0, out.r + 1)(rng);
  for (std::uint32_t e = 0; e < edits && !alphabet.empty(); ++e) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
    out.pattern[pos] = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
  }
  return out;
}

namespace {

SweepRow run_row(std::span<const Symbol> text, const SweepConfig& config, std::uint32_t k,
                 std::uint32_t sigma) {
  IndexConfig ic;
  ic.k = k;
  ic.sigma = sigma;
  ic.mode = config.mode;
  ic.tau = config.tau;
  ic.seed = config.seed;
  ic.cluster_cap = config.cluster_cap;
  ic.exec = Execution::Serial;
  const MismatchIndex index = MismatchIndex::build(text, ic);

  SweepRow row;
  row.n = index.text().n();
  row.k = k;
  row.sigma = sigma;
  row.build_seconds = index.report().build_seconds;
  const SectionSizes sizes = section_sizes(index);
  row.index_bytes = sizes.total;
  row.tree_bytes = sizes.tree;
  row.inversion_bytes = sizes.inversions;
  row.nodes = index.report().nodes;
  row.leaves = index.report().leaves;
  row.missing_entries = index.report().missing_entries;
  for (const LabelReport& lr : index.report().labels) row.label_leaves.emplace_back(lr.path, lr.leaves);
  row.visited_bound = query_subtree_bound(row.n, k);

  std::vector<Symbol> alphabet(text.begin(), text.end());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

  // Same query stream for every sigma of one k.
  std::mt19937_64 rng(derive_seed(config.seed, k));
  std::vector<double> times;
  for (std::uint32_t q = 0; q < config.queries; ++q) {
    const QuerySpec spec = random_query(text, alphabet, k, rng);
    const auto t0 = std::chrono::steady_clock::now();
    const QueryResult res = index.query(spec.pattern, spec.r);
    times.push_back(
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count());
    row.mean_leaf_list += static_cast<double>(res.leaf_list);
    row.mean_visited += static_cast<double>(res.stats.visited_positive);
    row.max_visited = std::max(row.max_visited, res.stats.visited_positive);
    if (res.stats.visited_positive > row.visited_bound) ++row.bound_violations;
    row.duplicates += res.duplicates;
    row.mean_output += static_cast<double>(res.matches.size());
  }
  if (!times.empty()) {
    const double count = static_cast<double>(times.size());
    double total = 0;
    for (double t : times) total += t;
    row.mean_query_us = total / count;
    std::sort(times.begin(), times.end());
    row.median_query_us = times[(times.size() - 1) / 2];
    row.mean_leaf_list /= count;
    row.mean_visited /= count;
    row.mean_output /= count;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(std::span<const Symbol> text, const SweepConfig& config) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
  for (auto k : config.ks)
    for (auto s : config.sigmas) grid.emplace_back(k, s);
  std::vector<SweepRow> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  auto one = [&](std::int64_t i) {
    try {
      rows[i] = run_row(text, config, grid[i].first, grid[i].second);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto count = static_cast<std::int64_t>(grid.size());
  if (config.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) one(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace hdx
