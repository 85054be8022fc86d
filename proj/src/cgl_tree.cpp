#include "hdx/cgl_tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace hdx {

const char* to_string(Slot s) {
  switch (s) {
    case Slot::LessM: return "S<m";
    case Slot::LessL: return "S<l";
    case Slot::GreaterL: return "S>l";
    case Slot::GreaterM: return "S>m";
    case Slot::AltLessM: return "^S<m";
    case Slot::AltLessL: return "^S<l";
    case Slot::AltGreaterL: return "^S>l";
  }
  return "?";
}

const char* to_string(SubsetTag t) {
  switch (t) {
    case SubsetTag::LessM: return "LessM";
    case SubsetTag::LessL: return "LessL";
    case SubsetTag::GreaterL: return "GreaterL";
    case SubsetTag::GreaterM: return "GreaterM";
    case SubsetTag::IsPivot: return "IsPivot";
  }
  return "?";
}

std::string PathLabel::str() const {
  std::string out(length, 'u');
  for (std::uint32_t i = 0; i < length; ++i)
    if (altered_at(i)) out[i] = 'a';
  return out;
}

PathLabel PathLabel::parse(const std::string& s) {
  if (s.size() > 64) throw Error(ErrorCode::InvalidArgument, "path label too long");
  PathLabel out;
  for (char c : s) {
    if (c != 'u' && c != 'a') throw Error(ErrorCode::InvalidArgument, "path label must use u/a");
    out = out.child(c == 'a');
  }
  return out;
}

AlteredString CglTree::pivot(const CglNode& v) const {
  AlteredString s = AlteredString::text_suffix(v.pivot);
  for (std::uint32_t i = 0; i < v.alt_count; ++i) {
    const Alteration& a = alterations[v.alt_begin + i];
    s.alter(a.offset, a.symbol);
  }
  return s;
}

std::uint32_t CglTree::height() const {
  std::uint32_t h = 0;
  for (const CglNode& v : nodes) h = std::max<std::uint32_t>(h, v.path.length);
  return h;
}

std::size_t CglTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const CglNode& v) { return v.truncated; }));
}

void CglTree::assign_labels() {
  std::map<PathLabel, std::uint32_t> issued;
  for (CglNode& v : nodes)
    if (v.truncated) v.label = ++issued[v.path];
}

namespace {

void sort_set(std::vector<AlteredString>& set, const MismatchOracle& oracle) {
  std::vector<std::uint32_t> order(set.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return oracle.compare(set[a], set[b], nullptr) < 0;
  });
  std::vector<AlteredString> sorted;
  sorted.reserve(set.size());
  for (auto i : order) sorted.push_back(set[i]);
  set = std::move(sorted);
}

// Splits a sorted set. Unaltered subsets keep the input order.
Partition split_sorted(const std::vector<AlteredString>& set, std::uint32_t k_rem,
                       const MismatchOracle& oracle) {
  Partition out;
  const std::size_t s = set.size();
  const std::size_t pivot_index = (s + 1) / 2 - 1;
  out.pivot = set[pivot_index];
  if (s == 1) return out;

  std::vector<std::uint32_t> lcps(s, 0);
  for (std::size_t i = 0; i < s; ++i)
    if (i != pivot_index) lcps[i] = oracle.lcp_altered(set[i], out.pivot);
  std::vector<std::uint32_t> others;
  others.reserve(s - 1);
  for (std::size_t i = 0; i < s; ++i)
    if (i != pivot_index) others.push_back(lcps[i]);
  const std::size_t mid = (others.size() + 1) / 2 - 1;
  std::nth_element(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(mid), others.end());
  out.m = others[mid];

  const StringView view = oracle.view();
  for (std::size_t i = 0; i < s; ++i) {
    if (i == pivot_index) continue;
    SubsetTag tag;
    if (lcps[i] < out.m)
      tag = SubsetTag::LessM;
    else if (lcps[i] > out.m)
      tag = SubsetTag::GreaterM;
    else
      tag = i < pivot_index ? SubsetTag::LessL : SubsetTag::GreaterL;
    out.subsets[static_cast<int>(tag)].push_back(set[i]);
    // With alterations a set element can become a prefix of the pivot (or
    // the reverse). Such an element has no position to alter, and a query
    // never needs its altered copy: both strings keep k+1 sentinels, so the
    // query's first mismatch with the pivot comes before lcps[i].
    const int alt = altered_slot_index(tag);
    const bool alterable = lcps[i] < std::min(view.length(set[i]), view.length(out.pivot));
    if (k_rem > 0 && alt >= 0 && alterable)
      out.subsets[alt].push_back(pivot_alter(set[i], lcps[i], out.pivot, view));
  }
  return out;
}

}  // namespace

Partition partition_set(std::vector<AlteredString> set, std::uint32_t k_rem,
                        const MismatchOracle& oracle, bool presorted) {
  if (set.empty()) throw Error(ErrorCode::InvalidArgument, "cannot partition an empty set");
  if (!presorted) sort_set(set, oracle);
  return split_sorted(set, k_rem, oracle);
}

CglTree build_tree(const MismatchOracle& oracle, const TreeBuildOptions& options) {
  const PaddedText& text = oracle.text();
  CglTree tree;
  tree.n = text.n();
  tree.k = text.k();
  tree.sigma = options.sigma;

  struct Task {
    std::vector<AlteredString> set;
    std::int32_t parent;
    std::uint8_t slot;
    std::uint8_t k_rem;
    bool sorted;
    PathLabel path;
  };

  std::vector<AlteredString> root;
  root.reserve(text.n());
  bool root_sorted = false;
  if (oracle.mode() == LcpMode::Linear) {
    for (std::uint32_t start : oracle.exact().suffix_array())
      if (start < text.n()) root.push_back(AlteredString::text_suffix(start));
    root_sorted = true;
  } else {
    for (std::uint32_t i = 0; i < text.n(); ++i) root.push_back(AlteredString::text_suffix(i));
  }

  std::vector<Task> stack;
  stack.push_back(Task{std::move(root), -1, 0, static_cast<std::uint8_t>(tree.k), root_sorted, {}});

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();

    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    if (task.parent >= 0) tree.nodes[task.parent].child[task.slot] = id;
    tree.nodes.emplace_back();
    CglNode& node = tree.nodes.back();
    node.size = static_cast<std::uint32_t>(task.set.size());
    node.k_rem = task.k_rem;
    node.path = task.path;

    const bool leaf = options.sigma > 0 && node.size <= options.sigma;
    if (options.record == MemberRecording::All ||
        (leaf && options.record == MemberRecording::Leaves)) {
      tree.members.resize(tree.nodes.size());
      auto& rec = tree.members[id];
      for (const auto& s : task.set) rec.push_back(s.start());
    }
    if (leaf) {
      node.truncated = true;
      continue;
    }

    if (!task.sorted) sort_set(task.set, oracle);
    Partition part = split_sorted(task.set, task.k_rem, oracle);
    node.pivot = part.pivot.start();
    node.alt_begin = static_cast<std::uint32_t>(tree.alterations.size());
    node.alt_count = static_cast<std::uint8_t>(part.pivot.alteration_count());
    for (const Alteration& a : part.pivot.alterations()) tree.alterations.push_back(a);
    node.m = part.m;

    // Reverse slot order so that children pop in slot order (preorder).
    for (int slot = kSlotCount - 1; slot >= 0; --slot) {
      auto& subset = part.subsets[slot];
      if (subset.empty()) continue;
      const bool altered = is_altered(static_cast<Slot>(slot));
      stack.push_back(Task{std::move(subset), id, static_cast<std::uint8_t>(slot),
                           static_cast<std::uint8_t>(altered ? task.k_rem - 1 : task.k_rem),
                           !altered, task.path.child(altered)});
    }
  }
  if (options.record != MemberRecording::None) tree.members.resize(tree.nodes.size());
  tree.assign_labels();
  return tree;
}

Classification classify(const AlteredString& s, const CglTree& tree, std::uint32_t node,
                        const MismatchOracle& oracle, const QueryContext* ctx) {
  const CglNode& v = tree.nodes[node];
  Classification out;
  const int cmp = oracle.compare(s, tree.pivot(v), ctx, &out.lcp);
  if (cmp == 0)
    out.tag = SubsetTag::IsPivot;
  else if (out.lcp < v.m)
    out.tag = SubsetTag::LessM;
  else if (out.lcp > v.m)
    out.tag = SubsetTag::GreaterM;
  else
    out.tag = cmp < 0 ? SubsetTag::LessL : SubsetTag::GreaterL;
  return out;
}

namespace {

struct WorkItem {
  std::int32_t node;
  AlteredString q;
  std::uint32_t r;
  bool dfs;
};

// The recursion shared by full queries, engine leaf collection and
// matching-node searches. `on_pivot(node, dfs)` fires for every node whose
// pivot is a candidate; `on_leaf(node)` for every truncated leaf reached.
template <class OnPivot, class OnLeaf>
void run_recursion(const CglTree& tree, const MismatchOracle& oracle, const QueryContext& ctx,
                   std::vector<WorkItem> stack, TraversalStats& stats, OnPivot&& on_pivot,
                   OnLeaf&& on_leaf) {
  const StringView view = oracle.view(&ctx);
  auto push = [&](const CglNode& v, Slot slot, const AlteredString& q, std::uint32_t r,
                  bool dfs) {
    const std::int32_t c = v.child[slot_index(slot)];
    if (c >= 0) stack.push_back(WorkItem{c, q, r, dfs});
  };

  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    const CglNode& v = tree.nodes[item.node];
    const auto id = static_cast<std::uint32_t>(item.node);

    if (item.dfs) {
      if (v.truncated) {
        ++stats.leaves;
        on_leaf(id);
        continue;
      }
      ++stats.dfs_nodes;
      on_pivot(id, true);
      for (Slot s : {Slot::LessM, Slot::LessL, Slot::GreaterL, Slot::GreaterM})
        push(v, s, item.q, item.r, true);
      continue;
    }

    ++stats.visited;
    if (item.r > 0) ++stats.visited_positive;
    if (v.truncated) {
      ++stats.leaves;
      on_leaf(id);
      continue;
    }

    const AlteredString p = tree.pivot(v);
    const MismatchList mm = oracle.first_mismatches(item.q, p, item.r + 1, &ctx);
    if (mm.count <= item.r) on_pivot(id, false);
    if (!v.has_children()) continue;

    const std::uint32_t qlen = view.length(item.q);
    const std::uint32_t i = mm.count ? mm.positions[0] : mm.overlap;
    const std::uint32_t r = item.r;
    const AlteredString& q = item.q;

    if (i == qlen) {
      // q' is a prefix of the pivot: every set element sharing the first
      // |q'| pivot characters is an exact match and is collected by DFS.
      if (i < v.m) {
        push(v, Slot::LessM, q, r, false);
        push(v, Slot::LessL, q, r, true);
        push(v, Slot::GreaterL, q, r, true);
        push(v, Slot::GreaterM, q, r, true);
      } else if (i == v.m) {
        if (r > 0) push(v, Slot::AltLessM, q, r - 1, false);
        push(v, Slot::LessL, q, r, true);
        push(v, Slot::GreaterL, q, r, true);
        push(v, Slot::GreaterM, q, r, true);
      } else {
        if (r > 0) {
          push(v, Slot::AltLessM, q, r - 1, false);
          push(v, Slot::AltLessL, q, r - 1, false);
          push(v, Slot::AltGreaterL, q, r - 1, false);
        }
        push(v, Slot::GreaterM, q, r, false);
      }
      continue;
    }
    if (i == mm.overlap)
      throw Error(ErrorCode::InvalidArgument, "pivot is a proper prefix of the query string");

    const bool less = view.at(q, i) < view.at(p, i);
    AlteredString qhat;
    if (r > 0) qhat = pivot_alter(q, i, p, view);

    if (i < v.m) {
      push(v, Slot::LessM, q, r, false);
      if (r > 0) {
        push(v, Slot::LessL, qhat, r - 1, false);
        push(v, Slot::GreaterL, qhat, r - 1, false);
        push(v, Slot::GreaterM, qhat, r - 1, false);
      }
    } else if (i == v.m && less) {
      if (r > 0) push(v, Slot::AltLessM, q, r - 1, false);
      push(v, Slot::LessL, q, r, false);
      if (r > 0) {
        push(v, Slot::AltGreaterL, qhat, r - 1, false);
        push(v, Slot::GreaterM, qhat, r - 1, false);
      }
    } else if (i == v.m) {
      if (r > 0) {
        push(v, Slot::AltLessM, q, r - 1, false);
        push(v, Slot::AltLessL, qhat, r - 1, false);
      }
      push(v, Slot::GreaterL, q, r, false);
      if (r > 0) push(v, Slot::GreaterM, qhat, r - 1, false);
    } else {
      if (r > 0) {
        push(v, Slot::AltLessM, q, r - 1, false);
        push(v, Slot::AltLessL, q, r - 1, false);
        push(v, Slot::AltGreaterL, q, r - 1, false);
      }
      push(v, Slot::GreaterM, q, r, false);
    }
  }
}

}  // namespace

Traversal traverse(const CglTree& tree, const MismatchOracle& oracle, const QueryContext& ctx,
                   std::uint32_t r) {
  if (r > tree.k)
    throw Error(ErrorCode::RadiusOutOfRange,
                "radius " + std::to_string(r) + " exceeds k=" + std::to_string(tree.k));
  Traversal out;
  if (tree.nodes.empty()) return out;
  const AlteredString q = AlteredString::query_suffix(0);
  std::vector<WorkItem> stack{WorkItem{0, q, r, false}};
  run_recursion(
      tree, oracle, ctx, std::move(stack), out.stats,
      [&](std::uint32_t node, bool) {
        const std::uint32_t base = tree.nodes[node].pivot;
        const auto d = oracle.within_distance(q, AlteredString::text_suffix(base), r, &ctx);
        if (d)
          out.pivot_outputs.push_back(Match{base + 1, *d});
        else
          ++out.stats.filter_rejections;
      },
      [&](std::uint32_t node) { out.leaves.push_back(node); });
  return out;
}

QueryResult query_full(const CglTree& tree, const MismatchOracle& oracle,
                       std::span<const Symbol> q, std::uint32_t r) {
  if (tree.truncated())
    throw Error(ErrorCode::InvalidArgument, "query_full needs an untruncated tree");
  if (r > tree.k)
    throw Error(ErrorCode::RadiusOutOfRange,
                "radius " + std::to_string(r) + " exceeds k=" + std::to_string(tree.k));
  const QueryContext ctx = oracle.init_query(q);
  Traversal t = traverse(tree, oracle, ctx, r);
  QueryResult out;
  out.stats = t.stats;
  out.matches = std::move(t.pivot_outputs);
  std::sort(out.matches.begin(), out.matches.end(),
            [](const Match& a, const Match& b) { return a.position < b.position; });
  const auto last = std::unique(out.matches.begin(), out.matches.end(),
                                [](const Match& a, const Match& b) { return a.position == b.position; });
  out.duplicates = static_cast<std::uint64_t>(out.matches.end() - last);
  out.matches.erase(last, out.matches.end());
  return out;
}

std::vector<AlteredString> dfs_collect(const CglTree& tree, std::uint32_t node) {
  std::vector<AlteredString> out;
  std::vector<std::uint32_t> stack{node};
  while (!stack.empty()) {
    const CglNode& v = tree.nodes[stack.back()];
    stack.pop_back();
    if (v.truncated) continue;
    out.push_back(tree.pivot(v));
    for (int s = 0; s < 4; ++s)
      if (v.child[s] >= 0) stack.push_back(static_cast<std::uint32_t>(v.child[s]));
  }
  return out;
}

ManualTraversal manual_traversal(const CglTree& tree, std::uint32_t start, const AlteredString& s,
                                 const MismatchOracle& oracle, const QueryContext* ctx) {
  ManualTraversal out;
  std::uint32_t cur = start;
  for (;;) {
    out.path.push_back(cur);
    const CglNode& v = tree.nodes[cur];
    if (v.truncated || !v.has_children()) {
      if (!v.truncated && oracle.compare(s, tree.pivot(v), ctx) == 0) out.stopped_at_pivot = true;
      break;
    }
    const Classification c = classify(s, tree, cur, oracle, ctx);
    if (c.tag == SubsetTag::IsPivot) {
      out.stopped_at_pivot = true;
      break;
    }
    const std::int32_t next = v.child[static_cast<int>(c.tag)];
    if (next < 0) {
      out.empty_slot = true;
      break;
    }
    cur = static_cast<std::uint32_t>(next);
  }
  out.destination = cur;
  return out;
}

MatchingNodes matching_nodes(const CglTree& tree, std::uint32_t node, const AlteredString& q,
                             const MismatchOracle& oracle, const QueryContext& ctx) {
  MatchingNodes out;
  TraversalStats stats;
  std::vector<WorkItem> stack{WorkItem{static_cast<std::int32_t>(node), q, 0, false}};
  const StringView view = oracle.view(&ctx);
  const std::uint32_t qlen = view.length(q);
  run_recursion(
      tree, oracle, ctx, std::move(stack), stats,
      [&](std::uint32_t id, bool dfs) {
        // At radius 0 a candidate pivot agrees with q' on the overlap; it is a
        // matching node only if it is at least as long as q'.
        if (dfs || view.length(tree.pivot(id)) >= qlen) out.nodes.push_back(id);
      },
      [&](std::uint32_t id) { out.leaves.push_back(id); });
  std::sort(out.nodes.begin(), out.nodes.end());
  std::sort(out.leaves.begin(), out.leaves.end());
  return out;
}

}  // namespace hdx
