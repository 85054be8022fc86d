#ifndef HDX_ENGINE_HPP
#define HDX_ENGINE_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hdx/cgl_tree.hpp"
#include "hdx/fninv.hpp"
#include "hdx/mismatch.hpp"
#include "hdx/text.hpp"
#include "hdx/trunc_index.hpp"

namespace hdx {

struct IndexConfig {
  std::uint32_t k = 1;
  std::uint32_t sigma = 1;
  LcpMode mode = LcpMode::Linear;
  std::uint32_t tau = 1;  // sampling step of the fingerprints (succinct mode)
  std::uint64_t seed = 1;
  std::uint32_t cluster_cap = kDefaultClusterCap;
  bool audit = false;  // keep every node's member set after the build
  Execution exec = Execution::Parallel;
};

/// Inversion structure of one realized path label.
struct LabelInversion {
  PathLabel path;
  std::vector<std::uint32_t> leaves;  // node ids, leaves[l-1] carries label l
  InversionIndex inversion;
};

struct LabelReport {
  std::string path;
  std::size_t leaves = 0;
  std::size_t clusters = 0;
  std::size_t chain_entries = 0;
  std::size_t missing_entries = 0;
};

struct BuildReport {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t sigma = 0;
  std::size_t nodes = 0;
  std::size_t internal_nodes = 0;
  std::size_t leaves = 0;
  std::uint32_t height = 0;
  std::size_t chain_entries = 0;
  std::size_t missing_entries = 0;
  double build_seconds = 0;
  std::vector<LabelReport> labels;
};

struct LeafEntry {
  std::uint32_t label = 0;
  PathLabel path;
  std::uint32_t node = 0;
  friend bool operator==(const LeafEntry&, const LeafEntry&) = default;
};

struct LeafCollection {
  std::vector<LeafEntry> leaves;  // L, in visit order
  std::vector<Match> pivot_outputs;
  TraversalStats stats;
  std::uint64_t leaf_duplicates = 0;
};

/// Truncated tree plus one inversion structure per realized path label.
class MismatchIndex {
 public:
  MismatchIndex() = default;
  MismatchIndex(MismatchIndex&&) noexcept = default;
  MismatchIndex& operator=(MismatchIndex&&) noexcept = default;

  static MismatchIndex build(std::span<const Symbol> raw, const IndexConfig& config);

  /// Reassembles a loaded index; the oracle is rebuilt from the text and seed.
  static MismatchIndex assemble(std::span<const Symbol> raw, const IndexConfig& config,
                                CglTree tree, std::vector<LabelInversion> inversions);

  /// Matches sorted by position. Throws RadiusOutOfRange, SentinelInQuery, EmptyQuery.
  QueryResult query(std::span<const Symbol> q, std::uint32_t r) const;

  LeafCollection collect_leaves(const QueryContext& ctx, std::uint32_t r) const;

  /// Members of one leaf recovered by inversion (0-based suffix starts).
  std::vector<std::uint32_t> leaf_members(const LeafEntry& leaf) const;

  /// f for one label group, images are label - 1.
  std::uint32_t evaluate(std::size_t group, std::uint32_t i) const;

  const IndexConfig& config() const { return s_->config; }
  const PaddedText& text() const { return s_->text; }
  const MismatchOracle& oracle() const { return *s_->oracle; }
  const CglTree& tree() const { return s_->tree; }
  const std::vector<LabelInversion>& inversions() const { return s_->inversions; }
  const BuildReport& report() const { return s_->report; }
  /// Group index of a path label, or -1.
  std::ptrdiff_t group_of(const PathLabel& path) const;

 private:
  struct State {
    IndexConfig config;
    PaddedText text;
    std::unique_ptr<MismatchOracle> oracle;
    CglTree tree;
    std::vector<LabelInversion> inversions;
    BuildReport report;
  };
  // Dense f cache for one label group, kUnset until evaluated.
  using Memo = std::vector<std::uint32_t>;
  static void fill_report(State& s);
  std::vector<std::uint32_t> leaf_members(const LeafEntry& leaf, std::size_t group, Memo& memo) const;
  std::unique_ptr<State> s_;
};

/// Seed of the fingerprint bases for an index seed.
inline std::uint64_t fingerprint_seed(std::uint64_t seed) { return derive_seed(seed, 0x66696e67); }
/// Seed of the inversion structure for one path label.
inline std::uint64_t inversion_seed(std::uint64_t seed, const PathLabel& path) {
  return derive_seed(seed, (std::uint64_t{path.length} << 56) ^ path.bits ^ 0x696e76);
}

struct DictionaryMatch {
  std::uint32_t entry = 0;  // 0-based entry index
  std::uint32_t distance = 0;
  friend bool operator==(const DictionaryMatch&, const DictionaryMatch&) = default;
};

/// Dictionary queries through the interleaving reduction: reports entries e
/// with |e| >= |q| and Hamming distance at most r between q and e's prefix.
class DictionaryIndex {
 public:
  DictionaryIndex(const std::vector<std::vector<Symbol>>& entries, const IndexConfig& config);

  std::vector<DictionaryMatch> query(std::span<const Symbol> q, std::uint32_t r) const;

  const DictionaryCorpus& corpus() const { return corpus_; }
  const MismatchIndex& index() const { return index_; }

 private:
  DictionaryCorpus corpus_;
  MismatchIndex index_;
};

}  // namespace hdx

#endif  // HDX_ENGINE_HPP
