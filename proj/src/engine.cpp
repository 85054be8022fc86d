#include "hdx/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <unordered_map>

namespace hdx {

namespace {

void check_config(const IndexConfig& c) {
  if (c.sigma == 0) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 1");
  if (c.tau == 0) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
  if (c.mode == LcpMode::Linear && c.tau != 1)
    throw Error(ErrorCode::InvalidArgument, "tau > 1 needs succinct mode");
}

void sort_matches(std::vector<Match>& matches, std::uint64_t& duplicates) {
  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) { return a.position < b.position; });
  const auto last = std::unique(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    return a.position == b.position;
  });
  duplicates = static_cast<std::uint64_t>(matches.end() - last);
  assert(duplicates == 0 && "a position was reported twice");
  matches.erase(last, matches.end());
}

}  // namespace

MismatchIndex MismatchIndex::build(std::span<const Symbol> raw, const IndexConfig& config) {
  check_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  MismatchIndex out;
  out.s_ = std::make_unique<State>();
  State& s = *out.s_;
  s.config = config;
  s.text = PaddedText(raw, config.k);
  s.oracle = std::make_unique<MismatchOracle>(s.text, config.mode, config.tau,
                                              fingerprint_seed(config.seed));
  s.tree = build_tree(*s.oracle, TreeBuildOptions{config.sigma, config.audit ? MemberRecording::All
                                                                              : MemberRecording::Leaves});

  const std::vector<LabelGroup> groups = label_groups(s.tree);
  s.inversions.resize(groups.size());
  const std::uint32_t n = s.text.n();
  auto build_group = [&](std::size_t g, Execution inner) {
    LabelInversion& li = s.inversions[g];
    li.path = groups[g].path;
    li.leaves = groups[g].leaves;
    std::vector<std::uint32_t> table = f_table(s.tree, groups[g]);
    for (auto& v : table)
      if (v != kBot) v -= 1;
    const Evaluator f = [&table](std::uint32_t i) { return table[i]; };
    const InversionParams params =
        InversionParams::defaults(n, config.sigma, config.cluster_cap,
                                  inversion_seed(config.seed, li.path));
    li.inversion = build_inversion(f, params, inner);
  };
  const auto count = static_cast<std::int64_t>(groups.size());
  if (config.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t g = 0; g < count; ++g) build_group(static_cast<std::size_t>(g), Execution::Serial);
  } else {
    for (std::int64_t g = 0; g < count; ++g) build_group(static_cast<std::size_t>(g), Execution::Serial);
  }
  if (!config.audit) s.tree.members.clear();

  fill_report(s);
  s.report.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

MismatchIndex MismatchIndex::assemble(std::span<const Symbol> raw, const IndexConfig& config,
                                      CglTree tree, std::vector<LabelInversion> inversions) {
  check_config(config);
  MismatchIndex out;
  out.s_ = std::make_unique<State>();
  State& s = *out.s_;
  s.config = config;
  s.text = PaddedText(raw, config.k);
  if (tree.n != s.text.n() || tree.k != config.k || tree.sigma != config.sigma)
    throw Error(ErrorCode::CorruptIndex, "tree parameters disagree with the header");
  s.oracle = std::make_unique<MismatchOracle>(s.text, config.mode, config.tau,
                                              fingerprint_seed(config.seed));
  s.tree = std::move(tree);
  s.inversions = std::move(inversions);
  fill_report(s);
  return out;
}

void MismatchIndex::fill_report(State& s) {
  BuildReport& r = s.report;
  r = BuildReport{};
  r.n = s.text.n();
  r.k = s.config.k;
  r.sigma = s.config.sigma;
  r.nodes = s.tree.nodes.size();
  r.leaves = s.tree.leaf_count();
  r.internal_nodes = r.nodes - r.leaves;
  r.height = s.tree.height();
  for (const LabelInversion& li : s.inversions) {
    LabelReport lr;
    lr.path = li.path.str();
    lr.leaves = li.leaves.size();
    lr.clusters = li.inversion.clusters.size();
    for (const Cluster& c : li.inversion.clusters) lr.chain_entries += c.ends.size();
    lr.missing_entries = li.inversion.missing.entries();
    r.chain_entries += lr.chain_entries;
    r.missing_entries += lr.missing_entries;
    r.labels.push_back(std::move(lr));
  }
}

std::ptrdiff_t MismatchIndex::group_of(const PathLabel& path) const {
  const auto& inv = s_->inversions;
  auto it = std::lower_bound(inv.begin(), inv.end(), path,
                             [](const LabelInversion& li, const PathLabel& p) { return li.path < p; });
  if (it == inv.end() || it->path != path) return -1;
  return it - inv.begin();
}

std::uint32_t MismatchIndex::evaluate(std::size_t group, std::uint32_t i) const {
  const std::uint32_t label = eval_f(s_->tree, s_->inversions[group].path, i, *s_->oracle);
  return label == kBot ? kBot : label - 1;
}

LeafCollection MismatchIndex::collect_leaves(const QueryContext& ctx, std::uint32_t r) const {
  Traversal t = traverse(s_->tree, *s_->oracle, ctx, r);
  LeafCollection out;
  out.stats = t.stats;
  out.pivot_outputs = std::move(t.pivot_outputs);
  std::vector<std::uint32_t> seen;
  for (std::uint32_t node : t.leaves) {
    if (std::find(seen.begin(), seen.end(), node) != seen.end()) {
      ++out.leaf_duplicates;
      continue;
    }
    seen.push_back(node);
    const CglNode& v = s_->tree.nodes[node];
    out.leaves.push_back(LeafEntry{v.label, v.path, node});
  }
  return out;
}

std::vector<std::uint32_t> MismatchIndex::leaf_members(const LeafEntry& leaf) const {
  const std::ptrdiff_t g = group_of(leaf.path);
  if (g < 0) throw Error(ErrorCode::CorruptIndex, "leaf path label has no inversion structure");
  Memo memo;
  return leaf_members(leaf, static_cast<std::size_t>(g), memo);
}

// Chain walks revisit the same suffixes, across leaves of one label too.
std::vector<std::uint32_t> MismatchIndex::leaf_members(const LeafEntry& leaf, std::size_t group,
                                                       Memo& memo) const {
  constexpr std::uint32_t kUnset = kBot - 1;
  if (memo.empty()) memo.assign(s_->tree.n, kUnset);
  const Evaluator f = [&](std::uint32_t i) {
    if (i >= memo.size()) return evaluate(group, i);
    std::uint32_t& slot = memo[i];
    if (slot == kUnset) slot = evaluate(group, i);
    return slot;
  };
  return s_->inversions[group].inversion.invert(leaf.label - 1, f);
}

QueryResult MismatchIndex::query(std::span<const Symbol> q, std::uint32_t r) const {
  if (r > s_->config.k)
    throw Error(ErrorCode::RadiusOutOfRange,
                "radius " + std::to_string(r) + " exceeds the index's k=" + std::to_string(s_->config.k));
  const QueryContext ctx = s_->oracle->init_query(q);
  LeafCollection lc = collect_leaves(ctx, r);

  QueryResult out;
  out.stats = lc.stats;
  out.leaf_list = lc.leaves.size();
  out.leaf_duplicates = lc.leaf_duplicates;
  out.matches = std::move(lc.pivot_outputs);
  const AlteredString whole = AlteredString::query_suffix(0);
  std::unordered_map<std::size_t, Memo> memos;
  for (const LeafEntry& leaf : lc.leaves) {
    const std::ptrdiff_t g = group_of(leaf.path);
    if (g < 0) throw Error(ErrorCode::CorruptIndex, "leaf path label has no inversion structure");
    const auto group = static_cast<std::size_t>(g);
    for (std::uint32_t i : leaf_members(leaf, group, memos[group])) {
      ++out.candidates;
      if (auto d = s_->oracle->within_distance(whole, AlteredString::text_suffix(i), r, &ctx))
        out.matches.push_back(Match{i + 1, *d});
    }
  }
  sort_matches(out.matches, out.duplicates);
  return out;
}

DictionaryIndex::DictionaryIndex(const std::vector<std::vector<Symbol>>& entries,
                                 const IndexConfig& config)
    : corpus_(dictionary_transform(entries, config.k)),
      index_(MismatchIndex::build(corpus_.transformed, config)) {}

std::vector<DictionaryMatch> DictionaryIndex::query(std::span<const Symbol> q,
                                                    std::uint32_t r) const {
  const std::vector<Symbol> tq = dictionary_query_transform(q);
  const QueryResult res = index_.query(tq, r);
  std::vector<DictionaryMatch> out;
  for (const Match& m : res.matches) {
    const std::uint32_t start = m.position - 1;
    auto it = std::lower_bound(corpus_.offsets.begin(), corpus_.offsets.end(), start);
    if (it == corpus_.offsets.end() || *it != start) continue;
    const auto entry = static_cast<std::uint32_t>(it - corpus_.offsets.begin());
    if (corpus_.entries[entry].size() < q.size()) continue;
    out.push_back(DictionaryMatch{entry, m.distance});
  }
  return out;
}

}  // namespace hdx
