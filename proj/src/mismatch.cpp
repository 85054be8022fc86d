#include "hdx/mismatch.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace hdx {

// ---------------------------------------------------------------------------
// ExactLcpBackend

ExactLcpBackend::ExactLcpBackend(std::span<const Symbol> text)
    : size_(static_cast<std::uint32_t>(text.size())) {
  const std::uint32_t n = size_;
  sa_.resize(n);
  rank_.resize(n);
  if (n == 0) return;

  // Prefix doubling on dense symbol ranks.
  std::vector<Symbol> alphabet(text.begin(), text.end());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  for (std::uint32_t i = 0; i < n; ++i)
    rank_[i] = static_cast<std::uint32_t>(
        std::lower_bound(alphabet.begin(), alphabet.end(), text[i]) - alphabet.begin());
  std::iota(sa_.begin(), sa_.end(), 0u);

  std::vector<std::uint32_t> next(n);
  for (std::uint32_t h = 1;; h <<= 1) {
    auto key = [&](std::uint32_t i) {
      return std::pair<std::uint32_t, std::uint32_t>(rank_[i], i + h < n ? rank_[i + h] + 1 : 0);
    };
    std::sort(sa_.begin(), sa_.end(),
              [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
    next[sa_[0]] = 0;
    for (std::uint32_t r = 1; r < n; ++r)
      next[sa_[r]] = next[sa_[r - 1]] + (key(sa_[r - 1]) < key(sa_[r]) ? 1 : 0);
    rank_.swap(next);
    if (rank_[sa_[n - 1]] == n - 1 || h >= n) break;
  }

  // Kasai.
  lcp_.assign(n, 0);
  std::uint32_t h = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (rank_[i] == 0) {
      h = 0;
      continue;
    }
    const std::uint32_t j = sa_[rank_[i] - 1];
    while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
    lcp_[rank_[i]] = h;
    if (h > 0) --h;
  }

  const std::uint32_t levels = floor_log2(n) + 1;
  table_.resize(levels);
  table_[0] = lcp_;
  for (std::uint32_t j = 1; j < levels; ++j) {
    const std::uint32_t span = 1u << j;
    table_[j].resize(n - span + 1);
    for (std::uint32_t i = 0; i + span <= n; ++i)
      table_[j][i] = std::min(table_[j - 1][i], table_[j - 1][i + span / 2]);
  }
}

std::uint32_t ExactLcpBackend::range_min(std::uint32_t lo, std::uint32_t hi) const {
  const std::uint32_t j = floor_log2(hi - lo + 1);
  return std::min(table_[j][lo], table_[j][hi + 1 - (1u << j)]);
}

std::uint32_t ExactLcpBackend::lcp(std::uint32_t a, std::uint32_t b) const {
  if (a >= size_ || b >= size_) return 0;
  if (a == b) return size_ - a;
  std::uint32_t ra = rank_[a];
  std::uint32_t rb = rank_[b];
  if (ra > rb) std::swap(ra, rb);
  return range_min(ra + 1, rb);
}

// ---------------------------------------------------------------------------
// FingerprintLcpBackend

std::uint64_t FingerprintLcpBackend::mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kModulus);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t r = lo + hi;
  if (r >= kModulus) r -= kModulus;
  return r;
}

std::uint64_t FingerprintLcpBackend::add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  if (r >= kModulus) r -= kModulus;
  return r;
}

std::uint64_t FingerprintLcpBackend::sub(std::uint64_t a, std::uint64_t b) {
  return a >= b ? a - b : a + kModulus - b;
}

FingerprintLcpBackend::FingerprintLcpBackend(std::span<const Symbol> text, std::uint32_t tau,
                                             std::uint64_t seed)
    : text_(text), tau_(tau) {
  if (tau_ == 0) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
  std::mt19937_64 rng(derive_seed(seed, 0xF1));
  std::uniform_int_distribution<std::uint64_t> pick(2, kModulus - 2);
  base_ = {pick(rng), pick(rng)};
  build(text);
}

FingerprintLcpBackend::FingerprintLcpBackend(std::span<const Symbol> text, std::uint32_t tau,
                                             std::uint64_t base1, std::uint64_t base2)
    : text_(text), tau_(tau), base_{base1 % kModulus, base2 % kModulus} {
  if (tau_ == 0) throw Error(ErrorCode::InvalidArgument, "tau must be >= 1");
  build(text);
}

void FingerprintLcpBackend::build(std::span<const Symbol> text) {
  const auto n = static_cast<std::uint32_t>(text.size());
  const std::uint32_t blocks = (n + tau_ - 1) / tau_;
  for (int w = 0; w < 2; ++w) {
    auto& samples = samples_[w];
    samples.assign(blocks + 1, 0);
    std::uint64_t f = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i % tau_ == 0) samples[i / tau_] = f;
      f = add(mul(f, base_[w]), code(text[i]));
    }
    // The last slot holds F[n] even when n is not a multiple of tau.
    samples[blocks] = f;

    pow_small_[w].assign(tau_, 1);
    for (std::uint32_t r = 1; r < tau_; ++r) pow_small_[w][r] = mul(pow_small_[w][r - 1], base_[w]);
    const std::uint64_t step = mul(pow_small_[w][tau_ - 1], base_[w]);
    pow_block_[w].assign(blocks + 2, 1);
    for (std::uint32_t t = 1; t < pow_block_[w].size(); ++t)
      pow_block_[w][t] = mul(pow_block_[w][t - 1], step);
  }
}

std::uint64_t FingerprintLcpBackend::prefix(std::uint32_t x, int which) const {
  const auto n = static_cast<std::uint32_t>(text_.size());
  if (x == n) return samples_[which].back();
  const std::uint32_t block = x / tau_;
  std::uint64_t f = samples_[which][block];
  for (std::uint32_t i = block * tau_; i < x; ++i) f = add(mul(f, base_[which]), code(text_[i]));
  return f;
}

std::uint64_t FingerprintLcpBackend::power(std::uint32_t len, int which) const {
  return mul(pow_block_[which][len / tau_], pow_small_[which][len % tau_]);
}

// ---------------------------------------------------------------------------
// MismatchOracle

namespace {

/// Largest l <= overlap with equal prefixes, probing fingerprints only at
/// lengths first + t*tau and finishing with <= tau direct reads.
template <class FpEq, class DirectEq>
std::uint32_t fingerprint_search(std::uint32_t overlap, std::uint32_t first, std::uint32_t tau,
                                 FpEq&& fp_eq, DirectEq&& direct_eq) {
  auto scan = [&](std::uint32_t from, std::uint32_t to) {
    while (from < to && direct_eq(from)) ++from;
    return from;
  };
  if (first > overlap) return scan(0, overlap);
  if (!fp_eq(first)) return scan(0, first);
  const std::uint32_t tmax = (overlap - first) / tau;
  std::uint32_t lo = 0;
  std::uint32_t step = 1;
  while (lo + step <= tmax && fp_eq(first + (lo + step) * tau)) {
    lo += step;
    step <<= 1;
  }
  std::uint32_t hi = std::min(lo + step, tmax + 1);
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (fp_eq(first + mid * tau))
      lo = mid;
    else
      hi = mid;
  }
  const std::uint32_t start = first + lo * tau;
  const std::uint32_t stop = lo == tmax ? overlap : std::min(start + tau, overlap);
  return scan(start, stop);
}

}  // namespace

MismatchOracle::MismatchOracle(const PaddedText& text, LcpMode mode, std::uint32_t tau,
                               std::uint64_t seed, bool paranoid)
    : text_(&text), mode_(mode), paranoid_(paranoid) {
  if (mode == LcpMode::Linear) {
    if (tau != 1) throw Error(ErrorCode::InvalidArgument, "linear mode uses tau = 1");
    exact_ = ExactLcpBackend(text.symbols());
  }
  fingerprints_ = FingerprintLcpBackend(text.symbols(), tau, seed);
}

MismatchOracle::MismatchOracle(const PaddedText& text, LcpMode mode, std::uint32_t tau,
                               std::uint64_t base1, std::uint64_t base2, bool paranoid)
    : text_(&text), mode_(mode), paranoid_(paranoid) {
  if (mode == LcpMode::Linear) {
    if (tau != 1) throw Error(ErrorCode::InvalidArgument, "linear mode uses tau = 1");
    exact_ = ExactLcpBackend(text.symbols());
  }
  fingerprints_ = FingerprintLcpBackend(text.symbols(), tau, base1, base2);
}

QueryContext MismatchOracle::init_query(std::span<const Symbol> q) const {
  if (q.empty()) throw Error(ErrorCode::EmptyQuery, "query is empty");
  if (std::find(q.begin(), q.end(), kSentinel) != q.end())
    throw Error(ErrorCode::SentinelInQuery, "query contains the sentinel code");
  QueryContext ctx;
  ctx.query_.assign(q.begin(), q.end());
  for (int w = 0; w < 2; ++w) {
    auto& pre = ctx.prefix_[w];
    pre.resize(q.size() + 1);
    pre[0] = 0;
    const std::uint64_t b = fingerprints_.base(w);
    for (std::size_t i = 0; i < q.size(); ++i)
      pre[i + 1] = FingerprintLcpBackend::add(FingerprintLcpBackend::mul(pre[i], b),
                                              FingerprintLcpBackend::code(q[i]));
  }
  return ctx;
}

std::uint32_t MismatchOracle::lcp_text_text(std::uint32_t a, std::uint32_t b) const {
  const PaddedText& t = *text_;
  const std::uint32_t size = t.size();
  if (a >= size || b >= size) return 0;
  if (mode_ == LcpMode::Linear) return exact_.lcp(a, b);
  if (a == b) return size - a;

  const auto& fp = fingerprints_;
  const std::uint32_t overlap = size - std::max(a, b);
  const std::uint32_t tau = fp.tau();
  auto substring = [&](std::uint32_t start, std::uint64_t start_fp, std::uint32_t len, int w) {
    return FingerprintLcpBackend::sub(fp.prefix(start + len, w),
                                      FingerprintLcpBackend::mul(start_fp, fp.power(len, w)));
  };
  const std::uint64_t fa = fp.prefix(a, 0);
  const std::uint64_t fb = fp.prefix(b, 0);
  auto fp_eq = [&](std::uint32_t len) {
    return substring(a, fa, len, 0) == substring(b, fb, len, 0);
  };
  auto direct_eq = [&](std::uint32_t x) { return t[a + x] == t[b + x]; };
  const std::uint32_t first = (tau - a % tau) % tau;
  std::uint32_t lcp = fingerprint_search(overlap, first, tau, fp_eq, direct_eq);

  if (paranoid_) {
    bool ok = lcp == overlap || !direct_eq(lcp);
    if (ok && lcp > 0)
      ok = substring(a, fp.prefix(a, 1), lcp, 1) == substring(b, fp.prefix(b, 1), lcp, 1);
    if (!ok) {
      faults_.fetch_add(1, std::memory_order_relaxed);
      lcp = 0;
      while (lcp < overlap && direct_eq(lcp)) ++lcp;
    }
  }
  return lcp;
}

std::uint32_t MismatchOracle::lcp_text_query(std::uint32_t a, std::uint32_t b,
                                             const QueryContext& ctx) const {
  const PaddedText& t = *text_;
  const auto qlen = static_cast<std::uint32_t>(ctx.query_.size());
  if (a >= t.size() || b >= qlen) return 0;
  const std::uint32_t overlap = std::min(t.size() - a, qlen - b);
  const auto& fp = fingerprints_;
  const std::uint32_t tau = fp.tau();

  auto text_sub = [&](std::uint64_t start_fp, std::uint32_t len, int w) {
    return FingerprintLcpBackend::sub(fp.prefix(a + len, w),
                                      FingerprintLcpBackend::mul(start_fp, fp.power(len, w)));
  };
  auto query_sub = [&](std::uint32_t len, int w) {
    return FingerprintLcpBackend::sub(
        ctx.prefix_[w][b + len], FingerprintLcpBackend::mul(ctx.prefix_[w][b], fp.power(len, w)));
  };
  const std::uint64_t fa = fp.prefix(a, 0);
  auto fp_eq = [&](std::uint32_t len) { return text_sub(fa, len, 0) == query_sub(len, 0); };
  auto direct_eq = [&](std::uint32_t x) { return t[a + x] == ctx.query_[b + x]; };
  const std::uint32_t first = (tau - a % tau) % tau;
  std::uint32_t lcp = fingerprint_search(overlap, first, tau, fp_eq, direct_eq);

  if (paranoid_) {
    bool ok = lcp == overlap || !direct_eq(lcp);
    if (ok && lcp > 0) ok = text_sub(fp.prefix(a, 1), lcp, 1) == query_sub(lcp, 1);
    if (!ok) {
      faults_.fetch_add(1, std::memory_order_relaxed);
      lcp = 0;
      while (lcp < overlap && direct_eq(lcp)) ++lcp;
    }
  }
  return lcp;
}

std::uint32_t MismatchOracle::raw_lcp(const AlteredString& a, const AlteredString& b,
                                      std::uint32_t shift, const QueryContext* ctx) const {
  const std::uint32_t pa = a.start() + shift;
  const std::uint32_t pb = b.start() + shift;
  if (a.is_text() && b.is_text()) return lcp_text_text(pa, pb);
  if (!ctx) throw Error(ErrorCode::InvalidArgument, "query-based string without a query context");
  if (!a.is_text() && b.is_text()) return lcp_text_query(pb, pa, *ctx);
  if (a.is_text() && !b.is_text()) return lcp_text_query(pa, pb, *ctx);
  const auto& q = ctx->query_;
  std::uint32_t l = 0;
  while (pa + l < q.size() && pb + l < q.size() && q[pa + l] == q[pb + l]) ++l;
  return l;
}

MismatchList MismatchOracle::first_mismatches(const AlteredString& a, const AlteredString& b,
                                              std::uint32_t limit,
                                              const QueryContext* ctx) const {
  if (limit > kMaxMismatchLimit)
    throw Error(ErrorCode::InvalidArgument, "mismatch limit too large");
  const StringView v = view(ctx);
  MismatchList out;
  out.overlap = std::min(v.length(a), v.length(b));
  const auto alts_a = a.alterations();
  const auto alts_b = b.alterations();
  std::size_t ia = 0;
  std::size_t ib = 0;
  std::uint32_t pos = 0;
  while (pos < out.overlap && out.count < limit) {
    while (ia < alts_a.size() && alts_a[ia].offset < pos) ++ia;
    while (ib < alts_b.size() && alts_b[ib].offset < pos) ++ib;
    std::uint32_t event = out.overlap;
    if (ia < alts_a.size()) event = std::min(event, alts_a[ia].offset);
    if (ib < alts_b.size()) event = std::min(event, alts_b[ib].offset);
    if (pos < event) {
      const std::uint32_t raw = raw_lcp(a, b, pos, ctx);
      ++out.lcp_calls;
      if (pos + raw < event) {
        out.positions[out.count++] = pos + raw;
        pos += raw + 1;
        continue;
      }
      pos = event;
      if (pos == out.overlap) break;
    }
    if (v.at(a, pos) != v.at(b, pos)) out.positions[out.count++] = pos;
    ++pos;
  }
  out.exhausted = out.count < limit;
  return out;
}

std::uint32_t MismatchOracle::lcp_altered(const AlteredString& a, const AlteredString& b,
                                          const QueryContext* ctx) const {
  const MismatchList m = first_mismatches(a, b, 1, ctx);
  return m.count ? m.positions[0] : m.overlap;
}

std::optional<std::uint32_t> MismatchOracle::within_distance(const AlteredString& a,
                                                             const AlteredString& b,
                                                             std::uint32_t r,
                                                             const QueryContext* ctx) const {
  const MismatchList m = first_mismatches(a, b, r + 1, ctx);
  if (m.count <= r) return m.count;
  return std::nullopt;
}

int MismatchOracle::compare(const AlteredString& a, const AlteredString& b,
                            const QueryContext* ctx, std::uint32_t* lcp_out) const {
  const MismatchList m = first_mismatches(a, b, 1, ctx);
  const StringView v = view(ctx);
  if (m.count) {
    if (lcp_out) *lcp_out = m.positions[0];
    return v.at(a, m.positions[0]) < v.at(b, m.positions[0]) ? -1 : 1;
  }
  if (lcp_out) *lcp_out = m.overlap;
  const std::uint32_t la = v.length(a);
  const std::uint32_t lb = v.length(b);
  return la < lb ? -1 : (la > lb ? 1 : 0);
}

}  // namespace hdx
