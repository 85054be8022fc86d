#include "hdx/fninv.hpp"

#include <algorithm>
#include <cmath>

namespace hdx {

InversionParams InversionParams::defaults(std::uint32_t n, std::uint32_t sigma,
                                          std::uint32_t cluster_cap, std::uint64_t seed) {
  if (n == 0 || sigma == 0) throw Error(ErrorCode::InvalidArgument, "n and sigma must be >= 1");
  InversionParams p;
  p.n = n;
  p.sigma = sigma;
  p.seed = seed;
  const double s = sigma;
  p.chain_length = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(s * std::log2(s + 1))));
  const double full_c = std::ceil(s * s * std::pow(std::log2(s + 2), 3));
  p.clusters = static_cast<std::uint32_t>(std::min<double>(full_c, cluster_cap));
  const double l3 = std::pow(static_cast<double>(p.chain_length), 3);
  p.starts_per_cluster = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(n / l3)));
  return p;
}

std::optional<std::uint32_t> Cluster::lookup(std::uint32_t end) const {
  auto it = std::lower_bound(ends.begin(), ends.end(), end,
                             [](const auto& e, std::uint32_t key) { return e.first < key; });
  if (it == ends.end() || it->first != end) return std::nullopt;
  return it->second;
}

namespace {

std::uint32_t h_from_image(std::uint64_t seed, std::uint32_t i, std::uint32_t fi, std::uint32_t n) {
  return fi == kBot ? g_hash(seed, std::uint64_t{n} + i, n) : g_hash(seed, fi, n);
}

Cluster build_cluster(const Evaluator& f, const InversionParams& params, std::uint32_t index) {
  Cluster c;
  c.seed = derive_seed(params.seed, index);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(params.starts_per_cluster);
  for (std::uint32_t s = 0; s < params.starts_per_cluster; ++s) {
    const auto start = static_cast<std::uint32_t>(derive_seed(c.seed, s) % params.n);
    std::uint32_t e = start;
    for (std::uint32_t t = 0; t < params.chain_length; ++t) e = h_from_image(c.seed, e, f(e), params.n);
    pairs.emplace_back(e, start);
  }
  // Keep the first start per end, sorted by end.
  if (pairs.size() * 16 >= params.n) {
    std::vector<std::uint32_t> first(params.n, kBot);
    for (const auto& [e, start] : pairs)
      if (first[e] == kBot) first[e] = start;
    pairs.clear();
    for (std::uint32_t e = 0; e < params.n; ++e)
      if (first[e] != kBot) pairs.emplace_back(e, first[e]);
  } else {
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    pairs.erase(std::unique(pairs.begin(), pairs.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                pairs.end());
  }
  c.ends = std::move(pairs);
  return c;
}

// Chain recovery within one cluster; appends to `out`.
void recover(const Cluster& c, std::uint32_t j, const Evaluator& f, const InversionParams& params,
             std::vector<std::uint32_t>& out) {
  const std::uint32_t n = params.n;
  std::uint32_t w = g_hash(c.seed, j, n);
  for (std::uint32_t t = 0; t <= params.chain_length; ++t) {
    if (auto start = c.lookup(w)) {
      std::uint32_t e = *start;
      for (std::uint32_t s = 0; s <= params.chain_length; ++s) {
        const std::uint32_t fe = f(e);
        if (fe == j) out.push_back(e);
        if (s < params.chain_length) e = h_from_image(c.seed, e, fe, n);
      }
      return;
    }
    if (t < params.chain_length) w = h_step(c, w, f, n);
  }
}

}  // namespace

std::uint32_t h_step(const Cluster& c, std::uint32_t i, const Evaluator& f, std::uint32_t n) {
  return h_from_image(c.seed, i, f(i), n);
}

std::span<const std::uint32_t> MissingDict::find(std::uint32_t j) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), j);
  if (it == keys.end() || *it != j) return {};
  const auto k = static_cast<std::size_t>(it - keys.begin());
  return std::span(items).subspan(offsets[k], offsets[k + 1] - offsets[k]);
}

std::vector<std::uint32_t> InversionIndex::invert_chains_only(std::uint32_t j,
                                                              const Evaluator& f) const {
  if (j == kBot) throw Error(ErrorCode::BotQuery, "cannot invert the undefined value");
  std::vector<std::uint32_t> out;
  if (j >= params.n) return out;
  for (const Cluster& c : clusters) recover(c, j, f, params, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> InversionIndex::invert(std::uint32_t j, const Evaluator& f) const {
  std::vector<std::uint32_t> out = invert_chains_only(j, f);
  const auto extra = missing.find(j);
  out.insert(out.end(), extra.begin(), extra.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t InversionIndex::dictionary_entries() const {
  std::size_t total = missing.entries();
  for (const Cluster& c : clusters) total += c.ends.size();
  return total;
}

std::vector<Cluster> build_clusters(const Evaluator& f, const InversionParams& params,
                                    Execution exec) {
  std::vector<Cluster> out(params.clusters);
  const auto count = static_cast<std::int64_t>(params.clusters);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < count; ++c)
      out[c] = build_cluster(f, params, static_cast<std::uint32_t>(c));
  } else {
    for (std::int64_t c = 0; c < count; ++c)
      out[c] = build_cluster(f, params, static_cast<std::uint32_t>(c));
  }
  return out;
}

namespace {

// Dense per-point state, reset through `touched` so it is allocated once per thread.
struct CertifyScratch {
  static constexpr std::uint32_t kUnknown = UINT32_MAX;
  std::vector<std::uint32_t> dist, end_of, chain_of;  // chain_of: chain index + 1 of an end
  std::vector<std::uint32_t> touched, path;

  explicit CertifyScratch(std::uint32_t n) : dist(n, kUnknown), end_of(n, 0), chain_of(n, 0) {}
};

// Items one cluster's chain queries recover, for all images at once. Same
// result as running recover() per image: first stored end among the L+1
// points g(j), h(g(j)), ..., then every point of that chain mapping to j.
std::vector<std::uint32_t> cluster_recovered(const Cluster& c, const Evaluator& f,
                                             std::span<const std::uint32_t> images,
                                             const InversionParams& params, CertifyScratch& sc) {
  constexpr std::uint32_t kUnknown = CertifyScratch::kUnknown;
  const std::uint32_t n = params.n;
  const std::uint32_t cap = params.chain_length + 1;  // "no end within L steps"
  auto& dist = sc.dist;
  auto& end_of = sc.end_of;
  auto& path = sc.path;
  for (std::uint32_t x = 0; x < c.ends.size(); ++x) sc.chain_of[c.ends[x].first] = x + 1;

  auto remember = [&](std::uint32_t w, std::uint32_t d, std::uint32_t e) {
    dist[w] = d;
    end_of[w] = e;
    sc.touched.push_back(w);
  };
  auto resolve = [&](std::uint32_t w0) {
    path.clear();
    std::uint32_t w = w0, d = 0, e = 0;
    bool found = false;
    for (std::uint32_t t = 0; t < cap; ++t) {
      if (dist[w] != kUnknown) {
        d = dist[w];
        e = end_of[w];
        found = true;
        break;
      }
      if (sc.chain_of[w] != 0) {
        remember(w, 0, w);
        e = w;
        found = true;
        break;
      }
      path.push_back(w);
      w = h_from_image(c.seed, w, f(w), n);
    }
    if (!found) {
      remember(w0, cap, 0);  // only the first point's distance is exact
      return;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      d = std::min(d + 1, cap);
      remember(*it, d, e);
    }
  };

  std::vector<std::uint32_t> out;
  std::vector<std::int64_t> replayed(c.ends.size(), -1);  // offset into `points`
  std::vector<std::pair<std::uint32_t, std::uint32_t>> points;  // (f(e), e) per chain
  for (std::uint32_t j : images) {
    const std::uint32_t w = g_hash(c.seed, j, n);
    if (dist[w] == kUnknown) resolve(w);
    if (dist[w] > params.chain_length) continue;
    const std::uint32_t chain = sc.chain_of[end_of[w]] - 1;
    if (replayed[chain] < 0) {
      replayed[chain] = static_cast<std::int64_t>(points.size());
      std::uint32_t e = c.ends[chain].second;
      for (std::uint32_t s = 0; s <= params.chain_length; ++s) {
        const std::uint32_t fe = f(e);
        points.emplace_back(fe, e);
        if (s < params.chain_length) e = h_from_image(c.seed, e, fe, n);
      }
    }
    const auto first = points.begin() + replayed[chain];
    for (auto p = first; p != first + params.chain_length + 1; ++p)
      if (p->first == j) out.push_back(p->second);
  }

  for (std::uint32_t w : sc.touched) dist[w] = kUnknown;
  sc.touched.clear();
  for (const auto& [end, start] : c.ends) sc.chain_of[end] = 0;
  return out;
}

}  // namespace

MissingDict build_missing(const Evaluator& f, std::span<const Cluster> clusters,
                          const InversionParams& params, Execution exec) {
  const std::uint32_t n = params.n;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> image;  // (f(i), i)
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t fi = f(i);
    if (fi != kBot) image.emplace_back(fi, i);
  }
  std::sort(image.begin(), image.end());
  std::vector<std::uint32_t> keys;
  for (const auto& [fi, i] : image)
    if (keys.empty() || keys.back() != fi) keys.push_back(fi);

  std::vector<std::vector<std::uint32_t>> per_cluster(clusters.size());
  const auto count = static_cast<std::int64_t>(clusters.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel
    {
      CertifyScratch sc(n);
#pragma omp for schedule(dynamic)
      for (std::int64_t c = 0; c < count; ++c)
        per_cluster[c] = cluster_recovered(clusters[c], f, keys, params, sc);
    }
  } else {
    CertifyScratch sc(n);
    for (std::int64_t c = 0; c < count; ++c)
      per_cluster[c] = cluster_recovered(clusters[c], f, keys, params, sc);
  }
  std::vector<std::uint8_t> recovered(n, 0);
  for (const auto& items : per_cluster)
    for (std::uint32_t e : items) recovered[e] = 1;

  MissingDict out;
  out.offsets.push_back(0);
  for (std::size_t x = 0; x < image.size(); ++x) {
    if (recovered[image[x].second]) continue;
    if (out.keys.empty() || out.keys.back() != image[x].first) {
      if (!out.keys.empty()) out.offsets.push_back(static_cast<std::uint32_t>(out.items.size()));
      out.keys.push_back(image[x].first);
    }
    out.items.push_back(image[x].second);
  }
  if (!out.keys.empty()) out.offsets.push_back(static_cast<std::uint32_t>(out.items.size()));
  return out;
}

InversionIndex build_inversion(const Evaluator& f, const InversionParams& params, Execution exec) {
  InversionIndex out;
  out.params = params;
  out.clusters = build_clusters(f, params, exec);
  out.missing = build_missing(f, out.clusters, params, exec);
  return out;
}

}  // namespace hdx
