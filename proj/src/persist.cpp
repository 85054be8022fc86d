#include "hdx/persist.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace hdx {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'X', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::size_t size() const { return out_.size(); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  /// Count of items of `unit` bytes each, bounded by what remains.
  std::uint32_t count(std::size_t unit) {
    const std::uint32_t c = u32();
    if (unit && static_cast<std::size_t>(c) * unit > in_.size() - pos_) corrupt("count past end");
    return c;
  }
  bool done() const { return pos_ == in_.size(); }
  [[noreturn]] static void corrupt(const std::string& what) {
    throw Error(ErrorCode::CorruptIndex, "corrupt index: " + what);
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) corrupt("truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

void write_tree(Writer& w, const CglTree& tree) {
  w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
  for (const CglNode& v : tree.nodes) {
    if (v.truncated) {
      w.u8(1);
      w.u32(v.label);
      w.u32(v.size);
      continue;
    }
    w.u8(0);
    w.u32(v.pivot);
    w.u8(v.alt_count);
    for (std::uint32_t a = 0; a < v.alt_count; ++a) {
      w.u32(tree.alterations[v.alt_begin + a].offset);
      w.u32(tree.alterations[v.alt_begin + a].symbol);
    }
    w.u32(v.m);
    w.u8(v.k_rem);
    w.u32(v.size);
    std::uint8_t bitmap = 0;
    for (int s = 0; s < kSlotCount; ++s)
      if (v.child[s] >= 0) bitmap |= static_cast<std::uint8_t>(1u << s);
    w.u8(bitmap);
  }
}

CglTree read_tree(Reader& r, std::uint32_t n, std::uint32_t k, std::uint32_t sigma) {
  CglTree tree;
  tree.n = n;
  tree.k = k;
  tree.sigma = sigma;
  const std::uint32_t count = r.count(9);
  if (count == 0) Reader::corrupt("empty tree");
  tree.nodes.resize(count);
  struct Frame {
    std::uint32_t node;
    std::uint8_t remaining;
  };
  std::vector<Frame> stack;
  for (std::uint32_t id = 0; id < count; ++id) {
    CglNode& v = tree.nodes[id];
    const std::uint8_t kind = r.u8();
    std::uint8_t bitmap = 0;
    if (kind == 1) {
      v.truncated = true;
      v.label = r.u32();
      v.size = r.u32();
    } else if (kind == 0) {
      v.pivot = r.u32();
      if (v.pivot >= n) Reader::corrupt("pivot past the text");
      v.alt_count = r.u8();
      if (v.alt_count > k) Reader::corrupt("too many pivot alterations");
      v.alt_begin = static_cast<std::uint32_t>(tree.alterations.size());
      for (std::uint32_t a = 0; a < v.alt_count; ++a) {
        Alteration alt;
        alt.offset = r.u32();
        alt.symbol = r.u32();
        if (alt.offset >= n + 2 * k + 1 - v.pivot) Reader::corrupt("alteration past the suffix");
        tree.alterations.push_back(alt);
      }
      v.m = r.u32();
      v.k_rem = r.u8();
      v.size = r.u32();
      bitmap = r.u8();
      if (bitmap >> kSlotCount) Reader::corrupt("bad child bitmap");
    } else {
      Reader::corrupt("bad node kind");
    }

    if (id == 0) {
      if (kind == 0 && v.k_rem != k) Reader::corrupt("root budget");
      v.k_rem = static_cast<std::uint8_t>(k);
    } else {
      while (!stack.empty() && stack.back().remaining == 0) stack.pop_back();
      if (stack.empty()) Reader::corrupt("orphan node");
      Frame& f = stack.back();
      const int slot = __builtin_ctz(f.remaining);
      f.remaining = static_cast<std::uint8_t>(f.remaining & (f.remaining - 1));
      CglNode& parent = tree.nodes[f.node];
      parent.child[slot] = static_cast<std::int32_t>(id);
      const bool altered = is_altered(static_cast<Slot>(slot));
      if (altered && parent.k_rem == 0) Reader::corrupt("altered child without budget");
      const auto k_rem = static_cast<std::uint8_t>(altered ? parent.k_rem - 1 : parent.k_rem);
      if (kind == 0 && v.k_rem != k_rem) Reader::corrupt("budget mismatch");
      v.k_rem = k_rem;
      v.path = parent.path.child(altered);
    }
    if (bitmap) stack.push_back(Frame{id, bitmap});
  }
  for (const Frame& f : stack)
    if (f.remaining) Reader::corrupt("missing children");
  return tree;
}

void write_inversions(Writer& w, const std::vector<LabelInversion>& inversions) {
  w.u32(static_cast<std::uint32_t>(inversions.size()));
  for (const LabelInversion& li : inversions) {
    w.u8(li.path.length);
    w.u64(li.path.bits);
    const InversionParams& p = li.inversion.params;
    w.u32(p.n);
    w.u32(p.sigma);
    w.u32(p.chain_length);
    w.u32(p.clusters);
    w.u32(p.starts_per_cluster);
    w.u64(p.seed);
    w.u32(static_cast<std::uint32_t>(li.inversion.clusters.size()));
    for (const Cluster& c : li.inversion.clusters) {
      w.u64(c.seed);
      w.u32(static_cast<std::uint32_t>(c.ends.size()));
      for (const auto& [end, start] : c.ends) {
        w.u32(end);
        w.u32(start);
      }
    }
    const MissingDict& m = li.inversion.missing;
    w.u32(static_cast<std::uint32_t>(m.keys.size()));
    for (std::size_t x = 0; x < m.keys.size(); ++x) {
      w.u32(m.keys[x]);
      w.u32(m.offsets[x + 1] - m.offsets[x]);
      for (std::uint32_t o = m.offsets[x]; o < m.offsets[x + 1]; ++o) w.u32(m.items[o]);
    }
  }
}

std::vector<LabelInversion> read_inversions(Reader& r, const CglTree& tree) {
  const std::vector<LabelGroup> groups = label_groups(tree);
  const std::uint32_t count = r.count(9);
  if (count != groups.size()) Reader::corrupt("label count");
  std::vector<LabelInversion> out(count);
  for (std::uint32_t g = 0; g < count; ++g) {
    LabelInversion& li = out[g];
    li.path.length = r.u8();
    li.path.bits = r.u64();
    if (li.path != groups[g].path) Reader::corrupt("path label order");
    li.leaves = groups[g].leaves;
    InversionParams& p = li.inversion.params;
    p.n = r.u32();
    p.sigma = r.u32();
    p.chain_length = r.u32();
    p.clusters = r.u32();
    p.starts_per_cluster = r.u32();
    p.seed = r.u64();
    if (p.n != tree.n) Reader::corrupt("inversion universe");
    const std::uint32_t clusters = r.count(12);
    li.inversion.clusters.resize(clusters);
    for (Cluster& c : li.inversion.clusters) {
      c.seed = r.u64();
      const std::uint32_t entries = r.count(8);
      c.ends.resize(entries);
      for (auto& [end, start] : c.ends) {
        end = r.u32();
        start = r.u32();
        if (end >= p.n || start >= p.n) Reader::corrupt("chain entry out of range");
      }
    }
    MissingDict& m = li.inversion.missing;
    const std::uint32_t keys = r.count(8);
    m.offsets.push_back(0);
    for (std::uint32_t x = 0; x < keys; ++x) {
      m.keys.push_back(r.u32());
      const std::uint32_t items = r.count(4);
      for (std::uint32_t i = 0; i < items; ++i) {
        const std::uint32_t item = r.u32();
        if (item >= p.n) Reader::corrupt("missing item out of range");
        m.items.push_back(item);
      }
      m.offsets.push_back(static_cast<std::uint32_t>(m.items.size()));
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> serialize(const MismatchIndex& index, bool include_text,
                                    SectionSizes* sizes) {
  const IndexConfig& c = index.config();
  Writer w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kFormatVersion);
  w.u32(index.text().n());
  w.u32(c.k);
  w.u32(c.sigma);
  w.u8(static_cast<std::uint8_t>(c.mode));
  w.u32(c.tau);
  w.u64(c.seed);
  w.u32(c.cluster_cap);
  w.u8(include_text ? 1 : 0);
  SectionSizes s;
  s.header = w.size();
  if (include_text)
    for (Symbol x : index.text().original()) w.u32(x);
  s.text = w.size() - s.header;
  write_tree(w, index.tree());
  s.tree = w.size() - s.header - s.text;
  write_inversions(w, index.inversions());
  s.inversions = w.size() - s.header - s.text - s.tree;
  w.u32(crc_of(w.bytes()));
  s.total = w.size();
  if (sizes) *sizes = s;
  return std::move(w.bytes());
}

MismatchIndex deserialize(std::span<const std::uint8_t> bytes, const std::vector<Symbol>* text) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    Reader::corrupt("bad magic");
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  const std::uint32_t stored_crc = tail.u32();

  Reader r(body);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion, "unsupported index version " + std::to_string(version));
  if (crc_of(body) != stored_crc) Reader::corrupt("checksum mismatch");

  IndexConfig c;
  const std::uint32_t n = r.u32();
  c.k = r.u32();
  c.sigma = r.u32();
  const std::uint8_t mode = r.u8();
  if (mode > 1) Reader::corrupt("bad mode");
  c.mode = static_cast<LcpMode>(mode);
  c.tau = r.u32();
  c.seed = r.u64();
  c.cluster_cap = r.u32();
  const bool has_text = r.u8() != 0;

  std::vector<Symbol> raw;
  if (has_text) {
    if (static_cast<std::size_t>(n) * 4 > body.size()) Reader::corrupt("text length");
    raw.resize(n);
    for (auto& x : raw) x = r.u32();
  } else {
    if (!text)
      throw Error(ErrorCode::InvalidArgument, "index was saved without its text; supply --text");
    if (text->size() != n)
      throw Error(ErrorCode::InvalidArgument, "supplied text has length " +
                                                  std::to_string(text->size()) + ", index expects " +
                                                  std::to_string(n));
    raw = *text;
  }
  CglTree tree = read_tree(r, n, c.k, c.sigma);
  std::vector<std::uint32_t> stored;
  for (const CglNode& v : tree.nodes) stored.push_back(v.label);
  tree.assign_labels();
  for (std::size_t i = 0; i < stored.size(); ++i)
    if (stored[i] != tree.nodes[i].label) Reader::corrupt("leaf labels out of sequence");
  std::vector<LabelInversion> inversions = read_inversions(r, tree);
  if (!r.done()) Reader::corrupt("trailing bytes");
  return MismatchIndex::assemble(raw, c, std::move(tree), std::move(inversions));
}

void save_index(const std::filesystem::path& path, const MismatchIndex& index, bool include_text) {
  const std::vector<std::uint8_t> bytes = serialize(index, include_text);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

MismatchIndex load_index(const std::filesystem::path& path, const std::vector<Symbol>* text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize(bytes, text);
}

SectionSizes section_sizes(const MismatchIndex& index) {
  SectionSizes s;
  serialize(index, true, &s);
  return s;
}

}  // namespace hdx
