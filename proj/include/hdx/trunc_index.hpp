#ifndef HDX_TRUNC_INDEX_HPP
#define HDX_TRUNC_INDEX_HPP

#include <cstdint>
#include <vector>

#include "hdx/cgl_tree.hpp"

namespace hdx {

/// Truncated leaves sharing one path label, in label order (leaves[l-1] has label l).
struct LabelGroup {
  PathLabel path;
  std::vector<std::uint32_t> leaves;
};

/// One group per path label realized by at least one leaf, sorted by label.
std::vector<LabelGroup> label_groups(const CglTree& tree);

/// Leaf count per realized path label, in label_groups order.
std::vector<std::size_t> leaf_counts(const CglTree& tree);

/// Label of the leaf with path label `path` that suffix `i` (0-based) walks
/// into, or kBot. Walks from the root: 'u' follows the unaltered subset of
/// the carried string, 'a' pivot-alters it and follows the altered subset.
std::uint32_t eval_f(const CglTree& tree, const PathLabel& path, std::uint32_t i,
                     const MismatchOracle& oracle);

struct LabeledImage {
  PathLabel path;
  std::uint32_t label = 0;
  friend bool operator==(const LabeledImage&, const LabeledImage&) = default;
};

/// Every (path, label) with eval_f(tree, path, i) == label != kBot, in one
/// walk that branches on both letters and shares prefixes between paths.
std::vector<LabeledImage> defined_images(const CglTree& tree, std::uint32_t i,
                                         const MismatchOracle& oracle);

/// Same function read off recorded leaf memberships: table[i] is the label
/// or kBot. Needs a build with at least MemberRecording::Leaves.
std::vector<std::uint32_t> f_table(const CglTree& tree, const LabelGroup& group);

}  // namespace hdx

#endif  // HDX_TRUNC_INDEX_HPP
