#ifndef HDX_CGL_TREE_HPP
#define HDX_CGL_TREE_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "hdx/mismatch.hpp"
#include "hdx/text.hpp"

namespace hdx {

/// Child slots of a node. The first four hold the recursive subsets, the
/// last three their pivot-altered counterparts (the altered S>m is never built).
enum class Slot : std::uint8_t { LessM, LessL, GreaterL, GreaterM, AltLessM, AltLessL, AltGreaterL };
inline constexpr int kSlotCount = 7;

constexpr int slot_index(Slot s) { return static_cast<int>(s); }
constexpr bool is_altered(Slot s) { return slot_index(s) >= 4; }

enum class SubsetTag : std::uint8_t { LessM, LessL, GreaterL, GreaterM, IsPivot };

const char* to_string(Slot s);
const char* to_string(SubsetTag t);

constexpr Slot unaltered_slot(SubsetTag t) { return static_cast<Slot>(t); }
/// Altered slot for a tag; GreaterM has none.
constexpr int altered_slot_index(SubsetTag t) {
  return t == SubsetTag::GreaterM ? -1 : static_cast<int>(t) + 4;
}

/// u/a string recording which edges entered altered subsets; 'a' is a set bit.
struct PathLabel {
  std::uint64_t bits = 0;
  std::uint8_t length = 0;

  PathLabel child(bool altered) const {
    PathLabel out = *this;
    if (altered) out.bits |= std::uint64_t{1} << length;
    ++out.length;
    return out;
  }
  bool altered_at(std::uint32_t i) const { return (bits >> i) & 1u; }
  std::uint32_t altered_count() const { return static_cast<std::uint32_t>(__builtin_popcountll(bits)); }
  bool is_prefix_of(const PathLabel& other) const {
    if (length > other.length) return false;
    const std::uint64_t mask = length == 64 ? ~0ull : ((std::uint64_t{1} << length) - 1);
    return (other.bits & mask) == bits;
  }
  std::string str() const;
  static PathLabel parse(const std::string& s);

  friend bool operator==(const PathLabel&, const PathLabel&) = default;
  friend auto operator<=>(const PathLabel& a, const PathLabel& b) {
    if (auto c = a.length <=> b.length; c != 0) return c;
    return a.bits <=> b.bits;
  }
};

struct CglNode {
  std::uint32_t pivot = 0;      // 0-based text start of the pivot's base suffix
  std::uint32_t alt_begin = 0;  // pivot alterations in CglTree::alterations
  std::uint32_t size = 0;       // |S|
  std::uint32_t m = 0;          // lower median of LCP(s, pivot) over S minus the pivot
  std::uint32_t label = 0;      // truncated leaves only, 1-based per path label
  PathLabel path;
  std::uint8_t alt_count = 0;
  std::uint8_t k_rem = 0;
  bool truncated = false;  // leaf of the truncated tree: stores its label only
  std::array<std::int32_t, kSlotCount> child{-1, -1, -1, -1, -1, -1, -1};

  bool has_children() const {
    for (auto c : child)
      if (c >= 0) return true;
    return false;
  }
  bool has_pivot() const { return !truncated; }
};

enum class MemberRecording : std::uint8_t { None, Leaves, All };

/// Nodes in preorder (slot order); nodes[0] is the root.
class CglTree {
 public:
  std::vector<CglNode> nodes;
  std::vector<Alteration> alterations;
  /// Base suffixes of each node's set when recorded (0-based text starts).
  std::vector<std::vector<std::uint32_t>> members;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t sigma = 0;  // 0: untruncated

  AlteredString pivot(const CglNode& v) const;
  AlteredString pivot(std::uint32_t node) const { return pivot(nodes[node]); }
  bool truncated() const { return sigma > 0; }
  std::uint32_t height() const;
  std::size_t leaf_count() const;
  /// Reassigns leaf labels 1, 2, ... per path label in preorder.
  void assign_labels();
};

struct TreeBuildOptions {
  std::uint32_t sigma = 0;  // 0 builds the full tree
  MemberRecording record = MemberRecording::None;
};

/// Result of splitting one set around its pivot.
struct Partition {
  AlteredString pivot;
  std::uint32_t m = 0;
  std::array<std::vector<AlteredString>, kSlotCount> subsets;
};

/// Sorts `set`, picks the rank-ceil(|S|/2) pivot and the lower-median LCP m,
/// and splits S minus the pivot into recursive and (if k_rem > 0) altered subsets.
Partition partition_set(std::vector<AlteredString> set, std::uint32_t k_rem,
                        const MismatchOracle& oracle, bool presorted = false);

CglTree build_tree(const MismatchOracle& oracle, const TreeBuildOptions& options = {});

struct Classification {
  SubsetTag tag = SubsetTag::IsPivot;
  std::uint32_t lcp = 0;
};

Classification classify(const AlteredString& s, const CglTree& tree, std::uint32_t node,
                        const MismatchOracle& oracle, const QueryContext* ctx = nullptr);

struct Match {
  std::uint32_t position = 0;  // 1-based start in the text
  std::uint32_t distance = 0;
  friend bool operator==(const Match&, const Match&) = default;
};

struct TraversalStats {
  std::uint64_t visited = 0;
  /// Nodes reached by non-DFS recursion with radius > 0.
  std::uint64_t visited_positive = 0;
  std::uint64_t dfs_nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t filter_rejections = 0;
};

struct Traversal {
  std::vector<Match> pivot_outputs;
  std::vector<std::uint32_t> leaves;  // truncated leaves reached, visit order
  TraversalStats stats;
};

/// Runs the query recursion from the root. On the full tree the pivot
/// outputs are the whole answer; on a truncated tree the reached leaves
/// still need their contents checked.
Traversal traverse(const CglTree& tree, const MismatchOracle& oracle, const QueryContext& ctx,
                   std::uint32_t r);

struct QueryResult {
  std::vector<Match> matches;  // sorted by position
  TraversalStats stats;
  std::uint64_t duplicates = 0;
  std::uint64_t leaf_list = 0;        // |L|
  std::uint64_t leaf_duplicates = 0;  // repeated entries of L
  std::uint64_t candidates = 0;       // suffixes recovered from L by inversion
};

/// Full-tree query. Throws RadiusOutOfRange, SentinelInQuery, EmptyQuery.
QueryResult query_full(const CglTree& tree, const MismatchOracle& oracle,
                       std::span<const Symbol> q, std::uint32_t r);

/// Pivots of `node` and all its unaltered descendants (truncated leaves
/// contribute nothing).
std::vector<AlteredString> dfs_collect(const CglTree& tree, std::uint32_t node);

struct ManualTraversal {
  std::uint32_t destination = 0;
  std::vector<std::uint32_t> path;  // nodes visited, start first
  bool stopped_at_pivot = false;    // s equals the pivot of `destination`
  bool empty_slot = false;          // the slot s belongs to holds no node
};

ManualTraversal manual_traversal(const CglTree& tree, std::uint32_t start, const AlteredString& s,
                                 const MismatchOracle& oracle, const QueryContext* ctx = nullptr);

struct MatchingNodes {
  std::vector<std::uint32_t> nodes;   // descendants whose pivot has q' as a prefix
  std::vector<std::uint32_t> leaves;  // truncated leaves reached on the way
};

MatchingNodes matching_nodes(const CglTree& tree, std::uint32_t node, const AlteredString& q,
                             const MismatchOracle& oracle, const QueryContext& ctx);

inline PathLabel path_label(const CglTree& tree, std::uint32_t node) {
  return tree.nodes[node].path;
}

}  // namespace hdx

#endif  // HDX_CGL_TREE_HPP
