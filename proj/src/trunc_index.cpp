#include "hdx/trunc_index.hpp"

#include <algorithm>
#include <map>

namespace hdx {

std::vector<LabelGroup> label_groups(const CglTree& tree) {
  std::map<PathLabel, std::vector<std::uint32_t>> by_path;
  for (std::uint32_t id = 0; id < tree.nodes.size(); ++id) {
    const CglNode& v = tree.nodes[id];
    if (!v.truncated) continue;
    auto& leaves = by_path[v.path];
    if (leaves.size() < v.label) leaves.resize(v.label);
    leaves[v.label - 1] = id;
  }
  std::vector<LabelGroup> out;
  out.reserve(by_path.size());
  for (auto& [path, leaves] : by_path) out.push_back(LabelGroup{path, std::move(leaves)});
  return out;
}

std::vector<std::size_t> leaf_counts(const CglTree& tree) {
  std::vector<std::size_t> out;
  for (const auto& g : label_groups(tree)) out.push_back(g.leaves.size());
  return out;
}

std::uint32_t eval_f(const CglTree& tree, const PathLabel& path, std::uint32_t i,
                     const MismatchOracle& oracle) {
  if (tree.nodes.empty() || i >= tree.n) return kBot;
  const StringView view = oracle.view();
  AlteredString s = AlteredString::text_suffix(i);
  std::uint32_t cur = 0;
  for (std::uint32_t step = 0; step < path.length; ++step) {
    const CglNode& v = tree.nodes[cur];
    if (v.truncated || !v.has_children()) return kBot;
    const Classification c = classify(s, tree, cur, oracle);
    if (c.tag == SubsetTag::IsPivot) return kBot;
    std::int32_t next;
    if (path.altered_at(step)) {
      const int slot = altered_slot_index(c.tag);
      if (slot < 0) return kBot;
      next = v.child[slot];
      if (next < 0) return kBot;
      const AlteredString p = tree.pivot(v);
      if (c.lcp >= std::min(view.length(s), view.length(p))) return kBot;
      s = pivot_alter(s, c.lcp, p, view);
    } else {
      next = v.child[static_cast<int>(c.tag)];
    }
    if (next < 0) return kBot;
    cur = static_cast<std::uint32_t>(next);
  }
  const CglNode& end = tree.nodes[cur];
  return end.truncated ? end.label : kBot;
}

namespace {

void images_from(const CglTree& tree, std::uint32_t cur, const AlteredString& s, PathLabel path,
                 const MismatchOracle& oracle, std::vector<LabeledImage>& out) {
  const CglNode& v = tree.nodes[cur];
  if (v.truncated) {
    out.push_back(LabeledImage{path, v.label});
    return;
  }
  if (!v.has_children()) return;
  const Classification c = classify(s, tree, cur, oracle);
  if (c.tag == SubsetTag::IsPivot) return;
  if (const std::int32_t next = v.child[static_cast<int>(c.tag)]; next >= 0)
    images_from(tree, static_cast<std::uint32_t>(next), s, path.child(false), oracle, out);
  const int slot = altered_slot_index(c.tag);
  if (slot < 0 || v.child[slot] < 0) return;
  const StringView view = oracle.view();
  const AlteredString p = tree.pivot(v);
  if (c.lcp >= std::min(view.length(s), view.length(p))) return;
  images_from(tree, static_cast<std::uint32_t>(v.child[slot]), pivot_alter(s, c.lcp, p, view),
              path.child(true), oracle, out);
}

}  // namespace

std::vector<LabeledImage> defined_images(const CglTree& tree, std::uint32_t i,
                                         const MismatchOracle& oracle) {
  std::vector<LabeledImage> out;
  if (tree.nodes.empty() || i >= tree.n) return out;
  images_from(tree, 0, AlteredString::text_suffix(i), PathLabel{}, oracle, out);
  return out;
}

std::vector<std::uint32_t> f_table(const CglTree& tree, const LabelGroup& group) {
  if (tree.members.size() != tree.nodes.size())
    throw Error(ErrorCode::InvalidArgument, "f_table needs recorded leaf members");
  std::vector<std::uint32_t> table(tree.n, kBot);
  for (std::uint32_t leaf : group.leaves)
    for (std::uint32_t i : tree.members[leaf]) table[i] = tree.nodes[leaf].label;
  return table;
}

}  // namespace hdx
