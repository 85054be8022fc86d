#ifndef HDX_TEXT_HPP
#define HDX_TEXT_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hdx/common.hpp"

namespace hdx {

/// Text followed by 2k+1 sentinels, so that no altered suffix (at most k
/// alterations) is a prefix of another.
class PaddedText {
 public:
  PaddedText() = default;

  /// Throws EmptyText, KOutOfRange (needs n >= 2 and 1 <= k <= max(1, floor(log2 n)/2))
  /// or ReservedSymbolInInput (the sentinel code appears in raw). k = 1 is
  /// accepted for every n >= 2.
  PaddedText(std::span<const Symbol> raw, std::uint32_t k);

  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }
  /// n + 2k + 1.
  std::uint32_t size() const { return static_cast<std::uint32_t>(symbols_.size()); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const Symbol> symbols() const { return symbols_; }
  std::span<const Symbol> original() const { return std::span(symbols_).first(n_); }

  static std::uint32_t max_k(std::uint64_t n);

 private:
  std::vector<Symbol> symbols_;
  std::uint32_t n_ = 0;
  std::uint32_t k_ = 0;
};

/// Convenience: pad_text(raw, k) == PaddedText(raw, k).
PaddedText pad_text(std::span<const Symbol> raw, std::uint32_t k);

/// Offsets are 0-based relative to the start of the altered string.
struct Alteration {
  std::uint32_t offset = 0;
  Symbol symbol = 0;
  friend bool operator==(const Alteration&, const Alteration&) = default;
};

inline constexpr std::size_t kMaxAlterations = 16;

enum class Origin : std::uint8_t { Text, Query };

/// A suffix of the text or of the query plus a short, canonical list of
/// substitutions (strictly increasing offsets).
class AlteredString {
 public:
  AlteredString() = default;

  static AlteredString text_suffix(std::uint32_t start) { return {Origin::Text, start}; }
  static AlteredString query_suffix(std::uint32_t start) { return {Origin::Query, start}; }

  Origin origin() const { return origin_; }
  std::uint32_t start() const { return start_; }
  bool is_text() const { return origin_ == Origin::Text; }

  std::span<const Alteration> alterations() const {
    return std::span(alts_).first(count_);
  }
  std::size_t alteration_count() const { return count_; }

  /// Inserts keeping offsets sorted; a repeated offset replaces the old entry.
  /// Throws TooManyAlterations past kMaxAlterations.
  void alter(std::uint32_t offset, Symbol symbol);

  /// Alteration at `offset`, if any.
  const Alteration* find(std::uint32_t offset) const;

  friend bool operator==(const AlteredString& a, const AlteredString& b) {
    if (a.origin_ != b.origin_ || a.start_ != b.start_ || a.count_ != b.count_) return false;
    for (std::size_t i = 0; i < a.count_; ++i)
      if (!(a.alts_[i] == b.alts_[i])) return false;
    return true;
  }

 private:
  AlteredString(Origin origin, std::uint32_t start) : start_(start), origin_(origin) {}

  std::array<Alteration, kMaxAlterations> alts_{};
  std::uint32_t start_ = 0;
  Origin origin_ = Origin::Text;
  std::uint8_t count_ = 0;
};

/// Resolves altered strings against a padded text and (optionally) a query.
class StringView {
 public:
  StringView(const PaddedText& text, std::span<const Symbol> query = {})
      : text_(&text), query_(query) {}

  const PaddedText& text() const { return *text_; }
  std::span<const Symbol> query() const { return query_; }

  std::uint32_t length(const AlteredString& s) const {
    return s.is_text() ? text_->size() - s.start()
                       : static_cast<std::uint32_t>(query_.size()) - s.start();
  }

  /// Base symbol, ignoring alterations.
  Symbol base_at(const AlteredString& s, std::uint32_t offset) const {
    return s.is_text() ? (*text_)[s.start() + offset] : query_[s.start() + offset];
  }

  Symbol at(const AlteredString& s, std::uint32_t offset) const {
    if (const Alteration* a = s.find(offset)) return a->symbol;
    return base_at(s, offset);
  }

 private:
  const PaddedText* text_;
  std::span<const Symbol> query_;
};

/// Applies the alterations of `s` to its base string. Throws AlterationPastEnd.
std::vector<Symbol> materialize(const AlteredString& s, const StringView& view);

/// Mismatches over the first min(|a|, |b|) positions.
std::uint32_t hamming_naive(std::span<const Symbol> a, std::span<const Symbol> b);

/// s with position `lcp` set to pivot[lcp]; `lcp` must be LCP(s, pivot).
/// Throws LcpAtEnd when lcp == min(|s|, |pivot|).
AlteredString pivot_alter(const AlteredString& s, std::uint32_t lcp,
                          const AlteredString& pivot, const StringView& view);

/// Dictionary entries interleaved with per-position counter codes
/// (e[0] c1 e[1] c2 ...), joined by runs of 2k+1 separator codes.
struct DictionaryCorpus {
  std::vector<std::vector<Symbol>> entries;
  std::vector<Symbol> transformed;
  std::vector<std::uint32_t> offsets;  // 0-based start of each entry in `transformed`
  std::uint32_t k = 0;
};

inline constexpr std::uint32_t kMaxCounter = kSeparator - kFirstReserved - 1;

inline Symbol counter_code(std::uint32_t position) { return kFirstReserved + position; }

/// Throws EntryTooLong, EmptyText, ReservedSymbolInInput.
DictionaryCorpus dictionary_transform(const std::vector<std::vector<Symbol>>& entries,
                                      std::uint32_t k);
std::vector<Symbol> dictionary_query_transform(std::span<const Symbol> q);

/// Bytes to symbols, one per byte.
std::vector<Symbol> symbols_from_bytes(std::string_view bytes);

}  // namespace hdx

#endif  // HDX_TEXT_HPP
