#include <zlib.h>

#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "hdx/oracle.hpp"
#include "hdx/persist.hpp"
#include "hdx/sweep.hpp"

using namespace hdx;

namespace {

IndexConfig config(std::uint32_t k, std::uint32_t sigma, LcpMode mode = LcpMode::Linear,
                   std::uint32_t tau = 1, std::uint64_t seed = 1) {
  IndexConfig c;
  c.k = k;
  c.sigma = sigma;
  c.mode = mode;
  c.tau = tau;
  c.seed = seed;
  return c;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::EmptyText;  // stands for "no error"
}

void reseal(std::vector<std::uint8_t>& bytes) {
  const std::size_t body = bytes.size() - 4;
  const auto crc = static_cast<std::uint32_t>(crc32(0L, bytes.data(), static_cast<uInt>(body)));
  for (int b = 0; b < 4; ++b) bytes[body + b] = static_cast<std::uint8_t>(crc >> (8 * b));
}

}  // namespace

TEST_CASE("round trip preserves bytes and answers") {
  std::mt19937_64 rng(1);
  for (int inst = 0; inst < 12; ++inst) {
    const auto raw = test::random_text(rng, 50 + rng() % 800, 2 + inst % 3);
    const std::uint32_t k = 1 + inst % PaddedText::max_k(raw.size());
    const bool succinct = inst % 3 == 2;
    const MismatchIndex idx = MismatchIndex::build(
        raw, config(k, 1u << (inst % 6), succinct ? LcpMode::Succinct : LcpMode::Linear,
                    succinct ? 4 : 1, inst));
    const auto bytes = serialize(idx);
    const MismatchIndex back = deserialize(bytes);
    CHECK(serialize(back) == bytes);
    CHECK(back.report().nodes == idx.report().nodes);
    CHECK(back.report().missing_entries == idx.report().missing_entries);
    const std::vector<Symbol> alphabet{'a', 'b', 'c', 'd'};
    for (int qi = 0; qi < 30; ++qi) {
      const QuerySpec spec = random_query(raw, alphabet, k, rng);
      REQUIRE(back.query(spec.pattern, spec.r).matches == idx.query(spec.pattern, spec.r).matches);
    }
  }
}

TEST_CASE("same seed, same bytes") {
  std::mt19937_64 rng(2);
  const auto raw = test::random_text(rng, 1024, 4);
  const auto a = serialize(MismatchIndex::build(raw, config(2, 8, LcpMode::Linear, 1, 42)));
  const auto b = serialize(MismatchIndex::build(raw, config(2, 8, LcpMode::Linear, 1, 42)));
  CHECK(a == b);
  const auto c = serialize(MismatchIndex::build(raw, config(2, 8, LcpMode::Linear, 1, 43)));
  CHECK(a != c);
}

TEST_CASE("damaged images are rejected") {
  std::mt19937_64 rng(3);
  const auto raw = test::random_text(rng, 300, 3);
  const auto bytes = serialize(MismatchIndex::build(raw, config(2, 4)));

  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK(code_of([&] { deserialize(flipped); }) == ErrorCode::CorruptIndex);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(code_of([&] { deserialize(magic); }) == ErrorCode::CorruptIndex);

  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(bytes.size() / 3));
  CHECK(code_of([&] { deserialize(cut); }) == ErrorCode::CorruptIndex);
  CHECK(code_of([&] { deserialize(std::vector<std::uint8_t>{'H', 'D'}); }) == ErrorCode::CorruptIndex);

  auto version = bytes;
  version[4] = 2;
  CHECK(code_of([&] { deserialize(version); }) == ErrorCode::UnsupportedVersion);

  // Resealed damage must still fail cleanly, never crash.
  int rejected = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto m = bytes;
    const std::size_t at = 8 + rng() % (m.size() - 12);
    m[at] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    reseal(m);
    try {
      deserialize(m);
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("images without text need the text at load") {
  std::mt19937_64 rng(4);
  const auto raw = test::random_text(rng, 500, 2);
  const MismatchIndex idx = MismatchIndex::build(raw, config(2, 4, LcpMode::Succinct, 8, 5));
  SectionSizes with, without;
  const auto full = serialize(idx, true, &with);
  const auto bare = serialize(idx, false, &without);
  CHECK(with.text == 4 * raw.size());
  CHECK(without.text == 0);
  CHECK(full.size() == bare.size() + 4 * raw.size());
  CHECK(code_of([&] { deserialize(bare); }) == ErrorCode::InvalidArgument);
  const std::vector<Symbol> shorter(raw.begin(), raw.end() - 1);
  CHECK(code_of([&] { deserialize(bare, &shorter); }) == ErrorCode::InvalidArgument);
  const MismatchIndex back = deserialize(bare, &raw);
  CHECK(back.query(test::sym("abab"), 1).matches == idx.query(test::sym("abab"), 1).matches);
  CHECK(serialize(back, false) == bare);
}

TEST_CASE("files on disk") {
  std::mt19937_64 rng(5);
  const auto raw = test::random_text(rng, 400, 4);
  const MismatchIndex idx = MismatchIndex::build(raw, config(2, 2));
  const auto dir = std::filesystem::temp_directory_path() / "hdx_persist_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.hdx";
  save_index(path, idx);
  const MismatchIndex back = load_index(path);
  CHECK(serialize(back) == serialize(idx));
  CHECK(code_of([&] { load_index(dir / "missing.hdx"); }) == ErrorCode::Io);
  CHECK(code_of([&] { save_index(dir / "no" / "such" / "dir.hdx", idx); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tree section shrinks as sigma grows") {
  std::mt19937_64 rng(6);
  const auto raw = test::random_text(rng, 2000, 4);
  std::size_t previous = SIZE_MAX;
  for (std::uint32_t sigma : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
    const SectionSizes s = section_sizes(MismatchIndex::build(raw, config(2, sigma)));
    CAPTURE(sigma);
    CHECK(s.tree <= previous);
    CHECK(s.total == s.header + s.text + s.tree + s.inversions + 4);
    previous = s.tree;
  }
}
