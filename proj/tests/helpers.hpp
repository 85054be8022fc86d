#ifndef HDX_TEST_HELPERS_HPP
#define HDX_TEST_HELPERS_HPP

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hdx/common.hpp"
#include "hdx/text.hpp"

namespace hdx::test {

inline std::vector<Symbol> sym(std::string_view s) { return symbols_from_bytes(s); }

/// Sentinels print as '$'.
inline std::string str(const std::vector<Symbol>& v) {
  std::string out;
  for (Symbol c : v) out.push_back(c == kSentinel ? '$' : static_cast<char>(c));
  return out;
}

inline std::vector<Symbol> random_text(std::mt19937_64& rng, std::size_t n, std::uint32_t alphabet) {
  std::uniform_int_distribution<std::uint32_t> d(0, alphabet - 1);
  std::vector<Symbol> out(n);
  for (auto& c : out) c = 'a' + d(rng);
  return out;
}

/// Random alterations on a text or query suffix, offsets within the string.
inline AlteredString random_altered(std::mt19937_64& rng, AlteredString s, std::uint32_t length,
                                    std::uint32_t count, std::uint32_t alphabet) {
  std::uniform_int_distribution<std::uint32_t> off(0, length - 1);
  std::uniform_int_distribution<std::uint32_t> d(0, alphabet - 1);
  for (std::uint32_t i = 0; i < count; ++i) s.alter(off(rng), 'a' + d(rng));
  return s;
}

}  // namespace hdx::test

#endif  // HDX_TEST_HELPERS_HPP
