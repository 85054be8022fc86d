#ifndef HDX_ORACLE_HPP
#define HDX_ORACLE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdx/cgl_tree.hpp"
#include "hdx/engine.hpp"
#include "hdx/fninv.hpp"
#include "hdx/text.hpp"

namespace hdx {

/// Every suffix start (1-based) within generalized Hamming distance r of q.
std::vector<Match> brute_force_query(const PaddedText& text, std::span<const Symbol> q,
                                     std::uint32_t r);

/// {i in [0, n) : f(i) = j}, sorted.
std::vector<std::uint32_t> brute_force_preimage(const Evaluator& f, std::uint32_t n,
                                                std::uint32_t j);

/// Entries e with |e| >= |q| whose first |q| symbols are within distance r of q.
std::vector<DictionaryMatch> brute_force_dictionary(const std::vector<std::vector<Symbol>>& entries,
                                                    std::span<const Symbol> q, std::uint32_t r);

/// Two independent distance paths used to cross-check each other.
std::uint32_t hamming_materialized(const AlteredString& a, const AlteredString& b,
                                   const StringView& view);
std::uint32_t hamming_by_positions(const AlteredString& a, const AlteredString& b,
                                   const StringView& view);

/// Trials and failures of the distance-reduction identities, by branch:
/// 0: i < j, 1: i > j, 2: i = j with differing next symbols (one mismatch
/// removed by altering the named string), 3: q is a prefix of p and
/// j >= |q| (distance 0), 4: q is a prefix of p and j < |q|.
struct IdentityReport {
  std::array<std::uint64_t, 5> trials{};
  std::array<std::uint64_t, 5> violations{};
};

/// Random ternary (q, s, p) triples until every branch saw `per_branch` trials.
IdentityReport check_distance_identities(std::uint64_t seed, std::uint64_t per_branch);

struct Violation {
  std::uint32_t node = 0;
  std::string invariant;
  std::string detail;
};

/// Structural checks over a built tree. With an oracle, also replays the
/// classification of every unaltered child's pivot against its parent.
std::vector<Violation> walk_invariants(const CglTree& tree, const MismatchOracle* oracle = nullptr);

/// Tree checks plus the per-label inversion checks of an index. With
/// `check_preimages`, enumerates the defined images of every suffix and
/// bounds each preimage by sigma.
std::vector<Violation> walk_invariants(const MismatchIndex& index, bool check_preimages);

}  // namespace hdx

#endif  // HDX_ORACLE_HPP
