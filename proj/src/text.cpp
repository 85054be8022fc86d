#include "hdx/text.hpp"

#include <algorithm>

namespace hdx {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::ReservedSymbolInInput: return "ReservedSymbolInInput";
    case ErrorCode::AlterationPastEnd: return "AlterationPastEnd";
    case ErrorCode::TooManyAlterations: return "TooManyAlterations";
    case ErrorCode::LcpAtEnd: return "LcpAtEnd";
    case ErrorCode::EntryTooLong: return "EntryTooLong";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::SentinelInQuery: return "SentinelInQuery";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::BotQuery: return "BotQuery";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CorruptIndex: return "CorruptIndex";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::uint32_t PaddedText::max_k(std::uint64_t n) {
  return n < 2 ? 0 : std::max<std::uint32_t>(1, floor_log2(n) / 2);
}

PaddedText::PaddedText(std::span<const Symbol> raw, std::uint32_t k) {
  if (raw.empty()) throw Error(ErrorCode::EmptyText, "text is empty");
  if (raw.size() >= kSentinel / 2)
    throw Error(ErrorCode::InvalidArgument, "text too long");
  const auto n = static_cast<std::uint32_t>(raw.size());
  if (k < 1 || k > max_k(n) || k >= kMaxAlterations)
    throw Error(ErrorCode::KOutOfRange,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(max_k(n)) +
                    "] for n=" + std::to_string(n));
  if (std::find(raw.begin(), raw.end(), kSentinel) != raw.end())
    throw Error(ErrorCode::ReservedSymbolInInput, "text contains the sentinel code");
  symbols_.reserve(raw.size() + 2 * k + 1);
  symbols_.assign(raw.begin(), raw.end());
  symbols_.resize(raw.size() + 2 * k + 1, kSentinel);
  n_ = n;
  k_ = k;
}

PaddedText pad_text(std::span<const Symbol> raw, std::uint32_t k) { return PaddedText(raw, k); }

void AlteredString::alter(std::uint32_t offset, Symbol symbol) {
  auto* first = alts_.data();
  auto* last = first + count_;
  auto* it = std::lower_bound(first, last, offset,
                              [](const Alteration& a, std::uint32_t o) { return a.offset < o; });
  if (it != last && it->offset == offset) {
    it->symbol = symbol;
    return;
  }
  if (count_ == kMaxAlterations)
    throw Error(ErrorCode::TooManyAlterations, "alteration list is full");
  std::move_backward(it, last, last + 1);
  *it = {offset, symbol};
  ++count_;
}

const Alteration* AlteredString::find(std::uint32_t offset) const {
  // Lists are short; a linear scan beats binary search here.
  for (std::size_t i = 0; i < count_; ++i) {
    if (alts_[i].offset == offset) return &alts_[i];
    if (alts_[i].offset > offset) break;
  }
  return nullptr;
}

std::vector<Symbol> materialize(const AlteredString& s, const StringView& view) {
  const std::uint32_t len = view.length(s);
  std::vector<Symbol> out(len);
  for (std::uint32_t i = 0; i < len; ++i) out[i] = view.base_at(s, i);
  for (const Alteration& a : s.alterations()) {
    if (a.offset >= len)
      throw Error(ErrorCode::AlterationPastEnd,
                  "alteration at offset " + std::to_string(a.offset) + " past length " +
                      std::to_string(len));
    out[a.offset] = a.symbol;
  }
  return out;
}

std::uint32_t hamming_naive(std::span<const Symbol> a, std::span<const Symbol> b) {
  const std::size_t len = std::min(a.size(), b.size());
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < len; ++i) d += a[i] != b[i];
  return d;
}

AlteredString pivot_alter(const AlteredString& s, std::uint32_t lcp, const AlteredString& pivot,
                          const StringView& view) {
  if (lcp >= std::min(view.length(s), view.length(pivot)))
    throw Error(ErrorCode::LcpAtEnd, "pivot-alter past the end of the shorter string");
  AlteredString out = s;
  out.alter(lcp, view.at(pivot, lcp));
  return out;
}

DictionaryCorpus dictionary_transform(const std::vector<std::vector<Symbol>>& entries,
                                      std::uint32_t k) {
  if (entries.empty()) throw Error(ErrorCode::EmptyText, "dictionary has no entries");
  DictionaryCorpus corpus;
  corpus.entries = entries;
  corpus.k = k;
  for (const auto& e : entries) {
    if (e.empty()) throw Error(ErrorCode::EmptyText, "empty dictionary entry");
    if (e.size() > kMaxCounter)
      throw Error(ErrorCode::EntryTooLong,
                  "entry of length " + std::to_string(e.size()) + " exhausts counter codes");
    for (Symbol c : e)
      if (c >= kFirstReserved)
        throw Error(ErrorCode::ReservedSymbolInInput, "entry uses a reserved code");
    if (!corpus.transformed.empty())
      corpus.transformed.insert(corpus.transformed.end(), 2 * k + 1, kSeparator);
    corpus.offsets.push_back(static_cast<std::uint32_t>(corpus.transformed.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
      corpus.transformed.push_back(e[i]);
      corpus.transformed.push_back(counter_code(static_cast<std::uint32_t>(i + 1)));
    }
  }
  return corpus;
}

std::vector<Symbol> dictionary_query_transform(std::span<const Symbol> q) {
  if (q.size() > kMaxCounter)
    throw Error(ErrorCode::EntryTooLong, "query exhausts counter codes");
  std::vector<Symbol> out;
  out.reserve(2 * q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.push_back(q[i]);
    out.push_back(counter_code(static_cast<std::uint32_t>(i + 1)));
  }
  return out;
}

std::vector<Symbol> symbols_from_bytes(std::string_view bytes) {
  std::vector<Symbol> out(bytes.size());
  std::transform(bytes.begin(), bytes.end(), out.begin(),
                 [](char c) { return static_cast<Symbol>(static_cast<unsigned char>(c)); });
  return out;
}

}  // namespace hdx
