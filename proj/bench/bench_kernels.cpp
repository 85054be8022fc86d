// Serial vs OpenMP timings for the parallel kernels, with an output equality check.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "hdx/engine.hpp"
#include "hdx/fninv.hpp"
#include "hdx/persist.hpp"
#include "hdx/sweep.hpp"

using namespace hdx;

namespace {

// Best of three runs.
template <class F>
double seconds(F&& fn) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* kernel, double serial, double parallel, bool same) {
  std::printf("%-22s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", kernel, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, same ? "identical" : "OUTPUT DIFFERS");
}

std::vector<Symbol> random_text(std::uint32_t n, std::uint32_t alphabet, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Symbol> out(n);
  for (auto& c : out) c = 'a' + static_cast<Symbol>(rng() % alphabet);
  return out;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  bool all_same = true;

  // Inversion over a table function: chain building, then certification.
  {
    constexpr std::uint32_t n = 1 << 18;
    std::mt19937_64 rng(1);
    std::vector<std::uint32_t> table(n);
    for (auto& v : table) v = rng() % 8 == 0 ? kBot : static_cast<std::uint32_t>(rng() % (n / 4));
    const Evaluator f = [&table](std::uint32_t i) { return table[i]; };
    const InversionParams p = InversionParams::defaults(n, 2, kDefaultClusterCap, 7);
    std::vector<Cluster> cs, cp;
    const double s1 = seconds([&] { cs = build_clusters(f, p, Execution::Serial); });
    const double p1 = seconds([&] { cp = build_clusters(f, p, Execution::Parallel); });
    row("cluster chains", s1, p1, cs == cp);
    all_same &= cs == cp;
    MissingDict ms, mp;
    const double s2 = seconds([&] { ms = build_missing(f, cs, p, Execution::Serial); });
    const double p2 = seconds([&] { mp = build_missing(f, cs, p, Execution::Parallel); });
    row("certification", s2, p2, ms == mp);
    all_same &= ms == mp;
  }

  // Full index build (inversions per path label).
  {
    const auto raw = random_text(4000, 4, 2);
    IndexConfig c;
    c.k = 2;
    c.sigma = 8;
    c.seed = 3;
    MismatchIndex a, b;
    c.exec = Execution::Serial;
    const double s = seconds([&] { a = MismatchIndex::build(raw, c); });
    c.exec = Execution::Parallel;
    const double p = seconds([&] { b = MismatchIndex::build(raw, c); });
    const bool same = serialize(a) == serialize(b);
    row("index build", s, p, same);
    all_same &= same;
  }

  // Benchmark sweep, one configuration per worker.
  {
    const auto raw = random_text(3000, 4, 4);
    SweepConfig c;
    c.ks = {1, 2};
    c.sigmas = {1, 4, 16};
    c.queries = 20;
    std::vector<SweepRow> rs, rp;
    c.exec = Execution::Serial;
    const double s = seconds([&] { rs = run_sweep(raw, c); });
    c.exec = Execution::Parallel;
    const double p = seconds([&] { rp = run_sweep(raw, c); });
    bool same = rs.size() == rp.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i)
      same = rs[i].index_bytes == rp[i].index_bytes && rs[i].max_visited == rp[i].max_visited &&
             rs[i].mean_output == rp[i].mean_output && rs[i].label_leaves == rp[i].label_leaves;
    row("sweep", s, p, same);
    all_same &= same;
  }
  return all_same ? 0 : 1;
}
