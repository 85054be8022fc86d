#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hdx/oracle.hpp"
#include "hdx/trunc_index.hpp"

using namespace hdx;

namespace {

struct Built {
  PaddedText text;
  std::unique_ptr<MismatchOracle> oracle;
  CglTree tree;
};

Built make(const std::vector<Symbol>& raw, std::uint32_t k, std::uint32_t sigma, std::uint64_t seed = 1) {
  Built b;
  b.text = PaddedText(raw, k);
  b.oracle = std::make_unique<MismatchOracle>(b.text, LcpMode::Linear, 1, seed);
  b.tree = build_tree(*b.oracle, {sigma, MemberRecording::Leaves});
  return b;
}

}  // namespace

TEST_CASE("a text no longer than sigma is one leaf") {
  const auto raw = test::sym("BANANA");
  const Built b = make(raw, 1, 6);
  REQUIRE(b.tree.nodes.size() == 1);
  const auto groups = label_groups(b.tree);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].path == PathLabel{});
  CHECK(groups[0].leaves == std::vector<std::uint32_t>{0});
  for (std::uint32_t i = 0; i < 6; ++i) CHECK(eval_f(b.tree, PathLabel{}, i, *b.oracle) == 1);
  CHECK(eval_f(b.tree, PathLabel{}, 6, *b.oracle) == kBot);
  CHECK(eval_f(b.tree, PathLabel::parse("u"), 0, *b.oracle) == kBot);
}

TEST_CASE("sigma = 1 leaves hold one suffix each") {
  std::mt19937_64 rng(3);
  const auto raw = test::random_text(rng, 200, 2);
  const Built b = make(raw, 2, 1);
  CHECK(walk_invariants(b.tree, b.oracle.get()).empty());
  std::map<PathLabel, std::size_t> leaves;
  for (std::uint32_t id = 0; id < b.tree.nodes.size(); ++id) {
    const CglNode& v = b.tree.nodes[id];
    if (!v.truncated) continue;
    CHECK(v.size == 1);
    ++leaves[v.path];
  }
  const auto groups = label_groups(b.tree);
  const auto counts = leaf_counts(b.tree);
  REQUIRE(groups.size() == leaves.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    CHECK(counts[g] == leaves[groups[g].path]);
    CHECK(counts[g] <= b.tree.n - 1);
    for (std::uint32_t l = 1; l <= groups[g].leaves.size(); ++l)
      CHECK(b.tree.nodes[groups[g].leaves[l - 1]].label == l);
  }
}

TEST_CASE("eval_f agrees with recorded leaf membership") {
  std::mt19937_64 rng(5);
  std::uint64_t evaluations = 0;
  std::uint64_t altered_hits = 0;
  for (int inst = 0; inst < 60; ++inst) {
    const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(2, 400)(rng);
    const std::uint32_t a = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
    const std::uint32_t k = std::uniform_int_distribution<std::uint32_t>(1, PaddedText::max_k(n))(rng);
    const std::uint32_t sigma = 1u << std::uniform_int_distribution<std::uint32_t>(0, 4)(rng);
    const auto raw = test::random_text(rng, n, a);
    const Built b = make(raw, k, sigma, inst);
    REQUIRE(walk_invariants(b.tree, b.oracle.get()).empty());
    std::set<PathLabel> realized;
    for (const LabelGroup& g : label_groups(b.tree)) {
      realized.insert(g.path);
      const auto table = f_table(b.tree, g);
      std::map<std::uint32_t, std::uint32_t> preimage;
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t f = eval_f(b.tree, g.path, i, *b.oracle);
        REQUIRE(f == table[i]);
        if (f != kBot) {
          ++preimage[f];
          altered_hits += g.path.altered_count() > 0;
        }
        ++evaluations;
      }
      for (auto [label, count] : preimage) {
        REQUIRE(count <= sigma);
        REQUIRE(count == b.tree.nodes[g.leaves[label - 1]].size);
      }
    }
    // A label no leaf carries maps everything to bot.
    for (const char* s : {"uuuuuuuuuuuuuuuuuuuuuuuuuuuuuu", "aaaaaaa"}) {
      const PathLabel p = PathLabel::parse(s);
      if (realized.count(p)) continue;
      for (std::uint32_t i = 0; i < n; ++i) REQUIRE(eval_f(b.tree, p, i, *b.oracle) == kBot);
    }
  }
  CHECK(evaluations > 10000);
  CHECK(altered_hits > 0);
}

TEST_CASE("one-pass image enumeration equals eval_f over every label") {
  std::mt19937_64 rng(6);
  std::uint64_t images = 0;
  for (int inst = 0; inst < 40; ++inst) {
    const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(2, 300)(rng);
    const std::uint32_t a = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
    const std::uint32_t k = std::uniform_int_distribution<std::uint32_t>(1, PaddedText::max_k(n))(rng);
    const std::uint32_t sigma = 1u << std::uniform_int_distribution<std::uint32_t>(0, 4)(rng);
    const Built b = make(test::random_text(rng, n, a), k, sigma, inst);
    const auto groups = label_groups(b.tree);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::vector<LabeledImage> want;
      for (const LabelGroup& g : groups)
        if (const std::uint32_t f = eval_f(b.tree, g.path, i, *b.oracle); f != kBot)
          want.push_back(LabeledImage{g.path, f});
      auto got = defined_images(b.tree, i, *b.oracle);
      std::sort(got.begin(), got.end(), [](const auto& x, const auto& y) { return x.path < y.path; });
      REQUIRE(got == want);
      images += got.size();
    }
    CHECK(defined_images(b.tree, n, *b.oracle).empty());
  }
  CHECK(images > 1000);
}

TEST_CASE("a suffix that is a pivot on the path evaluates to bot") {
  std::mt19937_64 rng(9);
  const auto raw = test::random_text(rng, 300, 3);
  const Built b = make(raw, 2, 4);
  const CglNode& root = b.tree.nodes[0];
  REQUIRE_FALSE(root.truncated);
  for (const LabelGroup& g : label_groups(b.tree))
    CHECK(eval_f(b.tree, g.path, root.pivot, *b.oracle) == kBot);
}

TEST_CASE("leaf counts shrink as sigma doubles") {
  std::mt19937_64 rng(13);
  const std::uint32_t n = 3000;
  const auto raw = test::random_text(rng, n, 4);
  std::size_t previous_total = SIZE_MAX;
  for (std::uint32_t sigma = 1; sigma <= 64; sigma *= 2) {
    const Built b = make(raw, 2, sigma);
    const std::size_t total = b.tree.leaf_count();
    CAPTURE(sigma);
    CHECK(total <= previous_total);
    // From sigma = 2 on, each doubling removes a third of the leaves or more.
    if (sigma >= 4 && previous_total >= 32)
      CHECK(static_cast<double>(previous_total) >= 1.5 * static_cast<double>(total));
    // Leaves of one label hold disjoint sets: O(n / sigma) of them.
    for (const LabelGroup& g : label_groups(b.tree)) CHECK(g.leaves.size() * sigma <= 4 * n);
    previous_total = total;
  }
}
