#include "hdx/oracle.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "hdx/trunc_index.hpp"

namespace hdx {

std::vector<Match> brute_force_query(const PaddedText& text, std::span<const Symbol> q,
                                     std::uint32_t r) {
  std::vector<Match> out;
  const auto symbols = text.symbols();
  for (std::uint32_t i = 0; i < text.n(); ++i) {
    const std::size_t len = std::min<std::size_t>(q.size(), symbols.size() - i);
    std::uint32_t d = 0;
    for (std::size_t x = 0; x < len && d <= r; ++x)
      if (q[x] != symbols[i + x]) ++d;
    if (d <= r) out.push_back(Match{i + 1, d});
  }
  return out;
}

std::vector<std::uint32_t> brute_force_preimage(const Evaluator& f, std::uint32_t n,
                                                std::uint32_t j) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < n; ++i)
    if (f(i) == j) out.push_back(i);
  return out;
}

std::vector<DictionaryMatch> brute_force_dictionary(const std::vector<std::vector<Symbol>>& entries,
                                                    std::span<const Symbol> q, std::uint32_t r) {
  std::vector<DictionaryMatch> out;
  for (std::uint32_t e = 0; e < entries.size(); ++e) {
    if (entries[e].size() < q.size()) continue;
    const std::uint32_t d = hamming_naive(q, entries[e]);
    if (d <= r) out.push_back(DictionaryMatch{e, d});
  }
  return out;
}

std::uint32_t hamming_materialized(const AlteredString& a, const AlteredString& b,
                                   const StringView& view) {
  return hamming_naive(materialize(a, view), materialize(b, view));
}

std::uint32_t hamming_by_positions(const AlteredString& a, const AlteredString& b,
                                   const StringView& view) {
  const std::uint32_t len = std::min(view.length(a), view.length(b));
  std::uint32_t d = 0;
  for (std::uint32_t i = 0; i < len; ++i)
    if (view.at(a, i) != view.at(b, i)) ++d;
  return d;
}

namespace {

std::uint32_t lcp_of(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::uint32_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return i;
}

std::vector<Symbol> with_symbol(std::vector<Symbol> s, std::uint32_t i, Symbol c) {
  s[i] = c;
  return s;
}

}  // namespace

IdentityReport check_distance_identities(std::uint64_t seed, std::uint64_t per_branch) {
  IdentityReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> bit(0, 2);
  std::uniform_int_distribution<std::uint32_t> len(3, 14);
  auto random_string = [&](std::uint32_t n) {
    std::vector<Symbol> out(n);
    for (auto& c : out) c = 'a' + bit(rng);
    return out;
  };
  auto done = [&] {
    for (auto t : rep.trials)
      if (t < per_branch) return false;
    return true;
  };
  auto record = [&](int branch, bool ok) {
    ++rep.trials[branch];
    if (!ok) ++rep.violations[branch];
  };
  while (!done()) {
    const auto p = random_string(len(rng));
    // q and s copy a random prefix of p so that long LCPs are common.
    auto derive = [&](std::uint32_t extra) {
      std::uniform_int_distribution<std::size_t> keep(0, p.size());
      std::vector<Symbol> out(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(keep(rng)));
      const auto tail = random_string(extra);
      out.insert(out.end(), tail.begin(), tail.end());
      if (out.empty()) out.push_back('a');
      return out;
    };
    const auto q = derive(std::uniform_int_distribution<std::uint32_t>(0, 5)(rng));
    const auto s = derive(std::uniform_int_distribution<std::uint32_t>(1, 6)(rng));
    const std::uint32_t i = lcp_of(q, p);
    const std::uint32_t j = lcp_of(s, p);
    const std::uint32_t d = hamming_naive(q, s);
    if (j >= std::min(s.size(), p.size())) continue;
    const auto s_hat = with_symbol(s, j, p[j]);
    if (i == q.size()) {
      if (j >= q.size())
        record(3, d == 0);
      else
        record(4, hamming_naive(q, s_hat) + 1 == d);
      continue;
    }
    if (i >= p.size()) continue;
    const auto q_hat = with_symbol(q, i, p[i]);
    if (i < j)
      record(0, hamming_naive(q_hat, s) + 1 == d);
    else if (i > j)
      record(1, hamming_naive(q, s_hat) + 1 == d);
    else if (j < s.size() && q[i] != s[j])
      record(2, hamming_naive(q_hat, s_hat) + 1 == d);
  }
  return rep;
}

namespace {

std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::vector<Violation> walk_invariants(const CglTree& tree, const MismatchOracle* oracle) {
  std::vector<Violation> out;
  auto report = [&](std::uint32_t node, const char* invariant, std::string detail) {
    out.push_back(Violation{node, invariant, std::move(detail)});
  };
  if (tree.nodes.empty()) {
    report(0, "non-empty", "tree has no nodes");
    return out;
  }
  const CglNode& root = tree.nodes[0];
  if (root.size != tree.n) report(0, "root-size", "root holds " + num(root.size) + " of " + num(tree.n));
  if (root.k_rem != tree.k) report(0, "root-budget", "k_rem " + num(root.k_rem));
  if (root.path.length != 0) report(0, "root-label", root.path.str());

  const std::uint32_t max_height = ceil_log2(tree.n);
  std::map<std::uint32_t, std::vector<PathLabel>> pivot_labels;
  std::map<PathLabel, std::uint32_t> last_label;
  std::vector<std::uint32_t> parents(tree.nodes.size(), 0);

  for (std::uint32_t id = 0; id < tree.nodes.size(); ++id) {
    const CglNode& v = tree.nodes[id];
    if (v.path.altered_count() > tree.k)
      report(id, "label-a-count", v.path.str() + " has more than k=" + num(tree.k) + " 'a'");
    if (v.path.altered_count() + v.k_rem != tree.k)
      report(id, "budget", "k_rem " + num(v.k_rem) + " on label " + v.path.str());
    if (v.path.length > max_height)
      report(id, "height", "depth " + num(v.path.length) + " > " + num(max_height));

    if (v.truncated) {
      if (!tree.truncated()) report(id, "leaf-kind", "label leaf in an untruncated tree");
      if (v.size > tree.sigma) report(id, "leaf-size", num(v.size) + " > sigma=" + num(tree.sigma));
      if (v.has_children()) report(id, "leaf-children", "label leaf has children");
      std::uint32_t& last = last_label[v.path];
      if (v.label != last + 1)
        report(id, "label-sequence", "label " + num(v.label) + " after " + num(last));
      last = v.label;
      if (!tree.members.empty() && tree.members[id].size() != v.size)
        report(id, "members", num(tree.members[id].size()) + " recorded, size " + num(v.size));
      continue;
    }

    if (tree.truncated() && v.size <= tree.sigma)
      report(id, "internal-size", num(v.size) + " <= sigma=" + num(tree.sigma));
    if (v.size == 0) report(id, "size", "empty node");
    if (v.size >= 2 && !v.has_children())
      report(id, "children", "set of " + num(v.size) + " without children");
    pivot_labels[v.pivot].push_back(v.path);

    std::uint32_t unaltered_total = 0;
    for (int slot = 0; slot < kSlotCount; ++slot) {
      const std::int32_t c = v.child[slot];
      if (c < 0) continue;
      if (static_cast<std::size_t>(c) <= id || static_cast<std::size_t>(c) >= tree.nodes.size()) {
        report(id, "child-order", "slot " + std::string(to_string(static_cast<Slot>(slot))) +
                                      " points to " + num(static_cast<std::uint32_t>(c)));
        continue;
      }
      const CglNode& child = tree.nodes[c];
      parents[c] = id;
      const bool altered = is_altered(static_cast<Slot>(slot));
      if (child.size > v.size / 2)
        report(id, "halving", std::string(to_string(static_cast<Slot>(slot))) + " holds " +
                                  num(child.size) + " of " + num(v.size));
      if (altered && v.k_rem == 0)
        report(id, "altered-budget", "altered child at k_rem=0");
      if (child.path != v.path.child(altered))
        report(id, "child-label", child.path.str() + " under " + v.path.str());
      if (!altered) unaltered_total += child.size;
    }
    if (unaltered_total + 1 != v.size)
      report(id, "partition", "children hold " + num(unaltered_total) + " of " + num(v.size - 1));
    if (v.k_rem > 0) {
      for (int t = 0; t < 3; ++t) {
        const std::int32_t a = v.child[t];
        const std::int32_t b = v.child[t + 4];
        const std::uint32_t sa = a < 0 ? 0 : tree.nodes[a].size;
        const std::uint32_t sb = b < 0 ? 0 : tree.nodes[b].size;
        if (sb > sa)
          report(id, "altered-size", std::string(to_string(static_cast<Slot>(t + 4))) + " holds " +
                                         num(sb) + ", its source " + num(sa));
      }
    }

    if (oracle) {
      for (int slot = 0; slot < 4; ++slot) {
        const std::int32_t c = v.child[slot];
        if (c < 0 || tree.nodes[c].truncated) continue;
        const Classification cl = classify(tree.pivot(tree.nodes[c]), tree, id, *oracle);
        if (static_cast<int>(cl.tag) != slot)
          report(id, "classification", std::string(to_string(static_cast<Slot>(slot))) +
                                           " child pivot classifies as " + to_string(cl.tag));
      }
    }
  }

  for (auto& [base, labels] : pivot_labels) {
    std::sort(labels.begin(), labels.end());
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = 0; b < labels.size(); ++b)
        if (a != b && labels[a].is_prefix_of(labels[b])) {
          report(0, "pivot-labels", "suffix " + num(base + 1) + ": " + labels[a].str() +
                                        " prefixes " + labels[b].str());
          a = labels.size();
          break;
        }
  }
  return out;
}

std::vector<Violation> walk_invariants(const MismatchIndex& index, bool check_preimages) {
  std::vector<Violation> out = walk_invariants(index.tree(), &index.oracle());
  const CglTree& tree = index.tree();
  const auto groups = label_groups(tree);
  const auto& inv = index.inversions();
  if (groups.size() != inv.size()) {
    out.push_back(Violation{0, "inversions", num(inv.size()) + " structures for " +
                                                 num(groups.size()) + " labels"});
    return out;
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].path != inv[g].path || groups[g].leaves != inv[g].leaves)
      out.push_back(Violation{0, "inversions", "label " + groups[g].path.str() + " mismatched"});
    for (std::uint32_t leaf : groups[g].leaves)
      if (inv[g].inversion.missing.find(tree.nodes[leaf].label - 1).size() > tree.sigma)
        out.push_back(Violation{leaf, "missing-size", "more than sigma missing items"});
  }
  if (!check_preimages) return out;
  // Every defined image of every suffix, counted per label.
  std::vector<std::vector<std::uint32_t>> counts(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) counts[g].assign(groups[g].leaves.size(), 0);
  for (std::uint32_t i = 0; i < tree.n; ++i) {
    for (const LabeledImage& im : defined_images(tree, i, index.oracle())) {
      auto it = std::lower_bound(groups.begin(), groups.end(), im.path,
                                 [](const LabelGroup& lg, const PathLabel& p) { return lg.path < p; });
      if (it == groups.end() || it->path != im.path || im.label == 0 || im.label > it->leaves.size()) {
        out.push_back(Violation{0, "preimage", "label " + num(im.label) + " not issued for " + im.path.str()});
        continue;
      }
      ++counts[static_cast<std::size_t>(it - groups.begin())][im.label - 1];
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t j = 0; j < groups[g].leaves.size(); ++j) {
      const std::uint32_t leaf = groups[g].leaves[j];
      if (counts[g][j] > tree.sigma)
        out.push_back(Violation{leaf, "preimage", "label " + num(j + 1) + " of " +
                                                      groups[g].path.str() + " has " +
                                                      num(counts[g][j]) + " preimages"});
      if (counts[g][j] != tree.nodes[leaf].size)
        out.push_back(Violation{leaf, "preimage-size", num(counts[g][j]) + " preimages for a set of " +
                                                           num(tree.nodes[leaf].size)});
    }
  }
  return out;
}

}  // namespace hdx
