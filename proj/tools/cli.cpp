#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "hdx/engine.hpp"
#include "hdx/oracle.hpp"
#include "hdx/persist.hpp"
#include "hdx/sweep.hpp"

namespace hdx::cli {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path);
  return ss.str();
}

// Whitespace-separated decimal codes, each below the reserved range.
std::vector<Symbol> parse_ints(const std::string& body, const std::string& where) {
  std::vector<Symbol> out;
  std::istringstream in(body);
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.front() == '-')
      throw Error(ErrorCode::InvalidArgument, where + ": not an integer code: '" + tok + "'");
    if (v >= kFirstReserved)
      throw Error(ErrorCode::ReservedSymbolInInput,
                  where + ": code " + tok + " is in the reserved range");
    out.push_back(static_cast<Symbol>(v));
  }
  return out;
}

std::vector<Symbol> load_text(const std::string& path, bool ints) {
  const std::string body = read_file(path);
  return ints ? parse_ints(body, path) : symbols_from_bytes(body);
}

std::vector<Symbol> parse_pattern(std::string s, bool ints, bool from_file) {
  if (from_file && !s.empty() && s.back() == '\n') {
    s.pop_back();
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }
  return ints ? parse_ints(s, "pattern") : symbols_from_bytes(s);
}

LcpMode parse_mode(const std::string& s) { return s == "succinct" ? LcpMode::Succinct : LcpMode::Linear; }

const char* mode_name(LcpMode m) { return m == LcpMode::Succinct ? "succinct" : "linear"; }

MismatchIndex open_index(const std::string& path, const std::string& text_path, bool ints) {
  if (text_path.empty()) return load_index(path);
  const std::vector<Symbol> raw = load_text(text_path, ints);
  return load_index(path, &raw);
}

int exit_code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::Io:
    case ErrorCode::CorruptIndex:
    case ErrorCode::UnsupportedVersion:
      return kIo;
    default:
      return kUsage;
  }
}

void print_report(std::ostream& out, const MismatchIndex& idx, const SectionSizes& sizes) {
  const BuildReport& r = idx.report();
  const IndexConfig& c = idx.config();
  out << "n: " << r.n << "\nk: " << r.k << "\nsigma: " << r.sigma << "\nmode: " << mode_name(c.mode)
      << "\ntau: " << c.tau << "\nseed: " << c.seed << "\ncluster_cap: " << c.cluster_cap
      << "\nnodes: " << r.nodes << "\ninternal_nodes: " << r.internal_nodes
      << "\nleaves: " << r.leaves << "\nheight: " << r.height
      << "\nchain_entries: " << r.chain_entries << "\nmissing_entries: " << r.missing_entries
      << "\nbuild_seconds: " << std::fixed << std::setprecision(3) << r.build_seconds
      << std::defaultfloat << "\nbytes_total: " << sizes.total << "\nbytes_text: " << sizes.text
      << "\nbytes_tree: " << sizes.tree << "\nbytes_inversions: " << sizes.inversions
      << "\nlabels:\n";
  for (const LabelReport& l : r.labels)
    out << "  - path: \"" << l.path << "\" leaves: " << l.leaves << " clusters: " << l.clusters
        << " chain_entries: " << l.chain_entries << " missing_entries: " << l.missing_entries << "\n";
}

json row_json(const SweepRow& r) {
  json labels = json::object();
  for (const auto& [path, count] : r.label_leaves) labels[path] = count;
  return {{"n", r.n},
          {"k", r.k},
          {"sigma", r.sigma},
          {"index_bytes", r.index_bytes},
          {"tree_bytes", r.tree_bytes},
          {"inversion_bytes", r.inversion_bytes},
          {"build_seconds", r.build_seconds},
          {"mean_query_us", r.mean_query_us},
          {"median_query_us", r.median_query_us},
          {"mean_leaf_list", r.mean_leaf_list},
          {"mean_visited", r.mean_visited},
          {"max_visited", r.max_visited},
          {"visited_bound", r.visited_bound},
          {"bound_violations", r.bound_violations},
          {"duplicates", r.duplicates},
          {"mean_output", r.mean_output},
          {"nodes", r.nodes},
          {"leaves", r.leaves},
          {"missing_entries", r.missing_entries},
          {"label_leaves", labels}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hdx: k-mismatch text index"};
  app.require_subcommand(1);

  // build
  std::string b_text, b_out, b_mode = "linear";
  bool b_ints = false, b_audit = false, b_no_text = false;
  std::uint32_t b_k = 1, b_sigma = 1, b_tau = 1, b_cap = kDefaultClusterCap;
  std::uint64_t b_seed = 1;
  auto* build = app.add_subcommand("build", "build an index and save it");
  build->add_option("--text", b_text, "text file")->required();
  build->add_flag("--ints", b_ints, "text holds whitespace-separated integer codes");
  build->add_option("--k", b_k, "maximum radius")->required();
  build->add_option("--sigma", b_sigma, "truncation threshold")->required()->check(CLI::Range(1u, 0xFFFFFFFFu));
  build->add_option("--mode", b_mode, "LCP backend")->check(CLI::IsMember({"linear", "succinct"}));
  build->add_option("--tau", b_tau, "fingerprint sampling step (succinct)")->check(CLI::Range(1u, 0xFFFFFFFFu));
  build->add_option("--seed", b_seed, "random seed");
  build->add_option("--out", b_out, "output index file")->required();
  build->add_option("--cluster-cap", b_cap, "chain-count cap per cluster");
  build->add_flag("--audit", b_audit, "walk all invariants after the build");
  build->add_flag("--no-text", b_no_text, "leave the text out of the file");

  // query
  std::string q_index, q_pattern, q_pattern_file, q_text;
  bool q_json = false, q_ints = false;
  std::uint32_t q_r = 0;
  auto* query = app.add_subcommand("query", "report matches within distance r");
  query->add_option("--index", q_index, "index file")->required();
  auto* pat = query->add_option("--pattern", q_pattern, "pattern string");
  auto* patf = query->add_option("--pattern-file", q_pattern_file, "file holding the pattern");
  pat->excludes(patf);
  query->add_option("--r", q_r, "radius")->required();
  query->add_flag("--json", q_json, "print a JSON array");
  query->add_flag("--ints", q_ints, "pattern and text are integer codes");
  query->add_option("--text", q_text, "text file, for indexes saved without it");

  // verify
  std::string v_index, v_text;
  bool v_ints = false;
  std::uint32_t v_trials = 1000;
  std::uint64_t v_seed = 1;
  auto* verify = app.add_subcommand("verify", "compare random queries with brute force");
  verify->add_option("--index", v_index, "index file")->required();
  verify->add_option("--trials", v_trials, "number of random queries");
  verify->add_option("--seed", v_seed, "query seed");
  verify->add_option("--text", v_text, "text file, for indexes saved without it");
  verify->add_flag("--ints", v_ints, "text holds integer codes");

  // bench
  std::string s_text, s_out, s_mode = "linear";
  bool s_ints = false;
  std::vector<std::uint32_t> s_ks{1, 2}, s_sigmas{1, 4, 16};
  std::uint32_t s_queries = 100, s_tau = 1, s_cap = kDefaultClusterCap;
  std::uint64_t s_seed = 1;
  auto* bench = app.add_subcommand("bench", "space/time sweep over k and sigma");
  bench->add_option("--text", s_text, "text file")->required();
  bench->add_flag("--ints", s_ints, "text holds integer codes");
  bench->add_option("--k", s_ks, "k values")->delimiter(',');
  bench->add_option("--sigma", s_sigmas, "sigma values")->delimiter(',')->check(CLI::Range(1u, 0xFFFFFFFFu));
  bench->add_option("--queries", s_queries, "queries per configuration");
  bench->add_option("--seed", s_seed, "seed");
  bench->add_option("--mode", s_mode, "LCP backend")->check(CLI::IsMember({"linear", "succinct"}));
  bench->add_option("--tau", s_tau, "fingerprint sampling step")->check(CLI::Range(1u, 0xFFFFFFFFu));
  bench->add_option("--cluster-cap", s_cap, "chain-count cap per cluster");
  bench->add_option("--out", s_out, "JSON report path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build) {
      if (b_mode == "linear" && b_tau != 1)
        throw Error(ErrorCode::InvalidArgument, "--tau applies to succinct mode only");
      IndexConfig c;
      c.k = b_k;
      c.sigma = b_sigma;
      c.mode = parse_mode(b_mode);
      c.tau = b_tau;
      c.seed = b_seed;
      c.cluster_cap = b_cap;
      c.audit = b_audit;
      const MismatchIndex idx = MismatchIndex::build(load_text(b_text, b_ints), c);
      if (b_audit) {
        const auto violations = walk_invariants(idx, true);
        for (const Violation& v : violations)
          err << "violation: node " << v.node << " " << v.invariant << ": " << v.detail << "\n";
        if (!violations.empty()) return kMismatch;
      }
      save_index(b_out, idx, !b_no_text);
      SectionSizes sizes = section_sizes(idx);
      if (b_no_text) {
        sizes.total -= sizes.text;
        sizes.text = 0;
      }
      print_report(out, idx, sizes);
      if (b_audit) out << "audit: ok\n";
      return kOk;
    }

    if (*query) {
      if (q_pattern_file.empty() && pat->count() == 0)
        throw Error(ErrorCode::InvalidArgument, "one of --pattern or --pattern-file is required");
      const MismatchIndex idx = open_index(q_index, q_text, q_ints);
      const std::vector<Symbol> p = q_pattern_file.empty()
                                        ? parse_pattern(q_pattern, q_ints, false)
                                        : parse_pattern(read_file(q_pattern_file), q_ints, true);
      if (q_r > idx.config().k)
        throw Error(ErrorCode::RadiusOutOfRange, "r=" + std::to_string(q_r) +
                                                     " exceeds the index's k=" +
                                                     std::to_string(idx.config().k));
      const auto matches = idx.query(p, q_r).matches;
      if (q_json) {
        json arr = json::array();
        for (const Match& m : matches) arr.push_back({{"position", m.position}, {"distance", m.distance}});
        out << arr.dump() << "\n";
      } else {
        for (const Match& m : matches) out << m.position << " " << m.distance << "\n";
      }
      return kOk;
    }

    if (*verify) {
      const MismatchIndex idx = open_index(v_index, v_text, v_ints);
      const auto raw = idx.text().original();
      std::set<Symbol> distinct(raw.begin(), raw.end());
      const std::vector<Symbol> alphabet(distinct.begin(), distinct.end());
      std::mt19937_64 rng(v_seed);
      std::uint64_t mismatches = 0;
      for (std::uint32_t t = 0; t < v_trials; ++t) {
        const QuerySpec spec = random_query(raw, alphabet, idx.config().k, rng);
        const auto got = idx.query(spec.pattern, spec.r).matches;
        const auto want = brute_force_query(idx.text(), spec.pattern, spec.r);
        if (got == want) continue;
        if (++mismatches <= 5) {
          err << "mismatch: trial " << t << " r=" << spec.r << " pattern=[";
          for (std::size_t i = 0; i < spec.pattern.size(); ++i) err << (i ? " " : "") << spec.pattern[i];
          err << "] engine=" << got.size() << " oracle=" << want.size() << "\n";
        }
      }
      const auto violations = walk_invariants(idx, false);
      for (const Violation& v : violations)
        err << "violation: node " << v.node << " " << v.invariant << ": " << v.detail << "\n";
      out << "trials: " << v_trials << "\nmismatches: " << mismatches
          << "\ninvariant_violations: " << violations.size() << "\n";
      const bool ok = mismatches == 0 && violations.empty();
      out << (ok ? "verify: ok" : "verify: FAILED") << "\n";
      return ok ? kOk : kMismatch;
    }

    if (*bench) {
      if (s_mode == "linear" && s_tau != 1)
        throw Error(ErrorCode::InvalidArgument, "--tau applies to succinct mode only");
      SweepConfig c;
      c.ks = s_ks;
      c.sigmas = s_sigmas;
      c.queries = s_queries;
      c.seed = s_seed;
      c.mode = parse_mode(s_mode);
      c.tau = s_tau;
      c.cluster_cap = s_cap;
      const auto rows = run_sweep(load_text(s_text, s_ints), c);
      json report{{"rows", json::array()}};
      std::uint64_t bad = 0;
      for (const SweepRow& r : rows) {
        report["rows"].push_back(row_json(r));
        bad += r.bound_violations + r.duplicates;
      }
      if (s_out.empty()) {
        out << report.dump(2) << "\n";
      } else {
        std::ofstream f(s_out);
        f << report.dump(2) << "\n";
        if (!f) throw Error(ErrorCode::Io, "cannot write " + s_out);
        out << "k sigma index_bytes tree_bytes build_s mean_query_us max_visited bound\n";
        for (const SweepRow& r : rows)
          out << r.k << " " << r.sigma << " " << r.index_bytes << " " << r.tree_bytes << " "
              << r.build_seconds << " " << r.mean_query_us << " " << r.max_visited << " "
              << r.visited_bound << "\n";
      }
      return bad == 0 ? kOk : kMismatch;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_of(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace hdx::cli
