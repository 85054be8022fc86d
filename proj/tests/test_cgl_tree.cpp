#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hdx/cgl_tree.hpp"
#include "hdx/oracle.hpp"
#include "hdx/sweep.hpp"

using namespace hdx;
using hdx::test::str;
using hdx::test::sym;

namespace {

const char* kWords = "AN#BACDA#BANAAAA#BANANA#BANAZAAAA#BANCNAB#BANCZZ#CAT#";

std::uint32_t word_start(const std::string& word) {
  const std::string text(kWords);
  const auto at = text.find(word + "#");
  REQUIRE(at != std::string::npos);
  REQUIRE((at == 0 || text[at - 1] == '#'));
  return static_cast<std::uint32_t>(at);
}

// Materialized string up to (excluding) the first '#'.
std::string word_of(const AlteredString& s, const StringView& v) {
  const std::string full = str(materialize(s, v));
  return full.substr(0, full.find('#'));
}

std::set<std::string> words_of(const std::vector<AlteredString>& set, const StringView& v) {
  std::set<std::string> out;
  for (const auto& s : set) out.insert(word_of(s, v));
  return out;
}

}  // namespace

TEST_CASE("partition of the BANANA word set") {
  const auto raw = sym(kWords);
  const PaddedText t(raw, 1);
  const MismatchOracle o(t, LcpMode::Linear, 1, 3);
  const StringView v = o.view();
  std::vector<AlteredString> set;
  for (const char* w : {"CAT", "BANCZZ", "AN", "BANAZAAAA", "BANANA", "BACDA", "BANCNAB", "BANAAAA"})
    set.push_back(AlteredString::text_suffix(word_start(w)));

  const Partition p = partition_set(set, 1, o);
  CHECK(word_of(p.pivot, v) == "BANANA");
  CHECK(p.m == 3);
  using W = std::set<std::string>;
  CHECK(words_of(p.subsets[slot_index(Slot::LessM)], v) == W{"CAT", "AN", "BACDA"});
  CHECK(p.subsets[slot_index(Slot::LessL)].empty());
  CHECK(words_of(p.subsets[slot_index(Slot::GreaterL)], v) == W{"BANCNAB", "BANCZZ"});
  CHECK(words_of(p.subsets[slot_index(Slot::GreaterM)], v) == W{"BANAAAA", "BANAZAAAA"});
  CHECK(words_of(p.subsets[slot_index(Slot::AltLessM)], v) == W{"BAT", "BN", "BANDA"});
  CHECK(p.subsets[slot_index(Slot::AltLessL)].empty());
  CHECK(words_of(p.subsets[slot_index(Slot::AltGreaterL)], v) == W{"BANANAB", "BANAZZ"});

  // No altered subsets once the budget is spent.
  const Partition p0 = partition_set(set, 0, o);
  for (int s = 4; s < kSlotCount; ++s) CHECK(p0.subsets[s].empty());
  CHECK(word_of(p0.pivot, v) == "BANANA");
}

TEST_CASE("classify against the BANANA pivot") {
  const auto raw = sym(kWords);
  const PaddedText t(raw, 1);
  const MismatchOracle o(t, LcpMode::Linear, 1, 3);
  CglTree tree;
  tree.n = t.n();
  tree.k = 1;
  tree.nodes.emplace_back();
  tree.nodes[0].pivot = word_start("BANANA");
  tree.nodes[0].m = 3;
  tree.nodes[0].size = 8;

  auto tag_of = [&](const char* q) {
    const auto qs = sym(q);
    const QueryContext ctx = o.init_query(qs);
    return classify(AlteredString::query_suffix(0), tree, 0, o, &ctx);
  };
  CHECK(tag_of("BAT").tag == SubsetTag::LessM);
  CHECK(tag_of("BAT").lcp == 2);
  CHECK(tag_of("BANDANA").tag == SubsetTag::GreaterL);
  CHECK(tag_of("BAN5").tag == SubsetTag::LessL);  // '5' sorts before 'A'
  CHECK(tag_of("BANAAA").tag == SubsetTag::GreaterM);
  CHECK(tag_of("BANANAS").tag == SubsetTag::GreaterM);
  CHECK(tag_of("BANANAS").lcp == 6);
  CHECK(classify(AlteredString::text_suffix(word_start("BANANA")), tree, 0, o).tag == SubsetTag::IsPivot);
  CHECK(classify(AlteredString::text_suffix(word_start("CAT")), tree, 0, o).tag == SubsetTag::LessM);
}

TEST_CASE("path labels") {
  const PathLabel root;
  const PathLabel ua = root.child(false).child(true);
  CHECK(ua.str() == "ua");
  CHECK(PathLabel::parse("ua") == ua);
  CHECK(ua.altered_count() == 1);
  CHECK(root.is_prefix_of(ua));
  CHECK(root.child(false).is_prefix_of(ua));
  CHECK_FALSE(root.child(true).is_prefix_of(ua));
  CHECK_FALSE(ua.is_prefix_of(root.child(false)));
  CHECK(root.child(true) > root.child(false));
  CHECK(root.child(false).child(false) > root.child(true));
  CHECK_THROWS_AS(PathLabel::parse("ux"), Error);
}

namespace {

struct Instance {
  std::vector<Symbol> raw;
  std::vector<Symbol> alphabet;
  std::uint32_t k;
};

Instance random_instance(std::mt19937_64& rng, std::uint32_t max_n) {
  Instance out;
  const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(2, max_n)(rng);
  const std::uint32_t a = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
  out.raw = test::random_text(rng, n, a);
  for (std::uint32_t c = 0; c < a; ++c) out.alphabet.push_back('a' + c);
  out.alphabet.push_back('z');  // a symbol absent from the text
  out.k = std::uniform_int_distribution<std::uint32_t>(1, PaddedText::max_k(n))(rng);
  return out;
}

}  // namespace

TEST_CASE("full-tree queries equal brute force") {
  std::mt19937_64 rng(101);
  std::uint64_t queries = 0;
  std::uint64_t nonempty = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const Instance in = random_instance(rng, inst < 900 ? 80 : 400);
    const PaddedText t(in.raw, in.k);
    const bool linear = inst % 2 == 0;
    const MismatchOracle o(t, linear ? LcpMode::Linear : LcpMode::Succinct,
                           linear ? 1 : 1 + inst % 5, inst);
    const CglTree tree = build_tree(o);
    REQUIRE(walk_invariants(tree, &o).empty());
    const std::uint64_t bound = query_subtree_bound(t.n(), t.k());
    for (int qi = 0; qi < 12; ++qi) {
      QuerySpec spec = random_query(in.raw, in.alphabet, in.k, rng);
      if (qi == 0) spec.pattern = in.raw;  // the whole text
      CAPTURE(inst);
      CAPTURE(str(in.raw));
      CAPTURE(str(spec.pattern));
      CAPTURE(spec.r);
      const QueryResult res = query_full(tree, o, spec.pattern, spec.r);
      const auto expect = brute_force_query(t, spec.pattern, spec.r);
      REQUIRE(res.matches == expect);
      REQUIRE(res.duplicates == 0);
      REQUIRE(res.stats.visited_positive <= bound);
      ++queries;
      nonempty += !expect.empty();
    }
  }
  CHECK(queries == 12000);
  CHECK(nonempty > queries / 2);
}

TEST_CASE("query errors") {
  const auto raw = sym("BANANA");
  const PaddedText t(raw, 1);
  const MismatchOracle o(t, LcpMode::Linear, 1, 1);
  const CglTree tree = build_tree(o);
  const auto q = sym("ANA");
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([&] { query_full(tree, o, q, 2); }) == ErrorCode::RadiusOutOfRange);
  CHECK(code_of([&] { query_full(tree, o, std::vector<Symbol>{}, 0); }) == ErrorCode::EmptyQuery);
  CHECK(code_of([&] { query_full(tree, o, std::vector<Symbol>{'A', kSentinel}, 0); }) ==
        ErrorCode::SentinelInQuery);
  const CglTree cut = build_tree(o, {2, MemberRecording::None});
  CHECK(code_of([&] { query_full(cut, o, q, 0); }) == ErrorCode::InvalidArgument);

  const QueryResult r0 = query_full(tree, o, q, 0);
  CHECK(r0.matches == std::vector<Match>{{2, 0}, {4, 0}});
}

TEST_CASE("structure: halving, height, members and dfs") {
  std::mt19937_64 rng(7);
  for (int inst = 0; inst < 60; ++inst) {
    const Instance in = random_instance(rng, 300);
    const PaddedText t(in.raw, in.k);
    const MismatchOracle o(t, LcpMode::Linear, 1, inst);
    const CglTree tree = build_tree(o, {0, MemberRecording::All});
    CHECK(walk_invariants(tree, &o).empty());
    CHECK(tree.height() <= ceil_log2(t.n()));
    for (std::uint32_t id = 0; id < tree.nodes.size(); ++id) {
      const CglNode& v = tree.nodes[id];
      for (int s = 0; s < kSlotCount; ++s)
        if (v.child[s] >= 0) REQUIRE(tree.nodes[v.child[s]].size <= v.size / 2);
      // Every set element appears once among the node's unaltered subtree pivots.
      std::vector<std::uint32_t> starts;
      for (const auto& p : dfs_collect(tree, id)) starts.push_back(p.start());
      std::sort(starts.begin(), starts.end());
      auto rec = tree.members[id];
      std::sort(rec.begin(), rec.end());
      REQUIRE(starts == rec);
      REQUIRE(rec.size() == v.size);
    }
    // The root holds each suffix exactly once.
    auto all = tree.members[0];
    std::sort(all.begin(), all.end());
    for (std::uint32_t i = 0; i < t.n(); ++i) REQUIRE(all[i] == i);
  }
}

TEST_CASE("manual traversal reaches the node holding a suffix as pivot") {
  std::mt19937_64 rng(19);
  for (int inst = 0; inst < 40; ++inst) {
    const Instance in = random_instance(rng, 200);
    const PaddedText t(in.raw, in.k);
    const MismatchOracle o(t, LcpMode::Linear, 1, inst);
    const CglTree tree = build_tree(o);
    for (std::uint32_t i = 0; i < t.n(); ++i) {
      const ManualTraversal m = manual_traversal(tree, 0, AlteredString::text_suffix(i), o);
      REQUIRE(m.stopped_at_pivot);
      REQUIRE_FALSE(m.empty_slot);
      REQUIRE(tree.nodes[m.destination].pivot == i);
      REQUIRE(tree.nodes[m.destination].alt_count == 0);
      REQUIRE(m.path.front() == 0);
      REQUIRE(m.path.back() == m.destination);
      REQUIRE(tree.nodes[m.destination].path.altered_count() == 0);
    }
    // Altered pivots are found from the root of their altered subtree.
    for (std::uint32_t id = 0; id < tree.nodes.size(); ++id) {
      const CglNode& v = tree.nodes[id];
      for (int s = 4; s < kSlotCount; ++s) {
        if (v.child[s] < 0) continue;
        const auto sub = static_cast<std::uint32_t>(v.child[s]);
        for (const auto& p : dfs_collect(tree, sub)) {
          const ManualTraversal m = manual_traversal(tree, sub, p, o);
          REQUIRE(m.stopped_at_pivot);
          REQUIRE(tree.pivot(m.destination) == p);
        }
      }
    }
  }
}

TEST_CASE("matching nodes equal a prefix scan") {
  std::mt19937_64 rng(23);
  for (int inst = 0; inst < 200; ++inst) {
    const Instance in = random_instance(rng, 150);
    const PaddedText t(in.raw, in.k);
    const MismatchOracle o(t, inst % 2 ? LcpMode::Linear : LcpMode::Succinct, inst % 2 ? 1 : 2, inst);
    const CglTree tree = build_tree(o);
    const StringView tv = o.view();
    for (int qi = 0; qi < 10; ++qi) {
      const auto q = random_query(in.raw, in.alphabet, 0, rng).pattern;
      const QueryContext ctx = o.init_query(q);
      const MatchingNodes got = matching_nodes(tree, 0, AlteredString::query_suffix(0), o, ctx);
      CHECK(got.leaves.empty());
      std::vector<std::uint32_t> expect;
      // Nodes reachable through unaltered edges whose pivot starts with q.
      std::vector<std::uint32_t> stack{0};
      while (!stack.empty()) {
        const std::uint32_t id = stack.back();
        stack.pop_back();
        const auto p = materialize(tree.pivot(id), tv);
        if (p.size() >= q.size() && std::equal(q.begin(), q.end(), p.begin())) expect.push_back(id);
        for (int s = 0; s < 4; ++s)
          if (tree.nodes[id].child[s] >= 0) stack.push_back(static_cast<std::uint32_t>(tree.nodes[id].child[s]));
      }
      std::sort(expect.begin(), expect.end());
      REQUIRE(got.nodes == expect);
    }
  }
}

TEST_CASE("truncated trees stop at sigma") {
  std::mt19937_64 rng(29);
  const auto raw = test::random_text(rng, 500, 2);
  const PaddedText t(raw, 2);
  const MismatchOracle o(t, LcpMode::Linear, 1, 5);
  std::size_t previous = SIZE_MAX;
  for (std::uint32_t sigma : {1u, 2u, 4u, 8u, 16u, 64u}) {
    const CglTree tree = build_tree(o, {sigma, MemberRecording::Leaves});
    CHECK(walk_invariants(tree, &o).empty());
    for (std::uint32_t id = 0; id < tree.nodes.size(); ++id) {
      const CglNode& v = tree.nodes[id];
      if (v.truncated) {
        CHECK(v.size <= sigma);
        CHECK(tree.members[id].size() == v.size);
      } else {
        CHECK(v.size > sigma);
      }
    }
    CHECK(tree.nodes.size() < previous);
    previous = tree.nodes.size();
  }
  const CglTree one = build_tree(o, {1000, MemberRecording::None});
  CHECK(one.nodes.size() == 1);
  CHECK(one.nodes[0].truncated);
  CHECK(one.nodes[0].label == 1);
}

TEST_CASE("walker on a tiny periodic text") {
  const auto raw = sym("AAAA");
  const PaddedText t(raw, 1);
  const MismatchOracle o(t, LcpMode::Linear, 1, 1);
  const CglTree tree = build_tree(o);
  CHECK(walk_invariants(tree, &o).empty());
  CHECK(query_full(tree, o, sym("AA"), 0).matches ==
        std::vector<Match>{{1, 0}, {2, 0}, {3, 0}});
  // The last suffix is A$...: one mismatch against AA.
  CHECK(query_full(tree, o, sym("AA"), 1).matches.back() == Match{4, 1});
}
