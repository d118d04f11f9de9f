#include "errortree/persistence.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "errortree/errors.hpp"

namespace errortree {

namespace {

constexpr char kMagic[5] = {'E', 'T', 'I', 'D', 'X'};
// magic, version, body length
constexpr std::size_t kPreambleSize = sizeof(kMagic) + 2 + 8;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void str(const std::string& s) {
    bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::span<const std::uint8_t> bytes() {
    const std::uint32_t n = u32();
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() {
    auto b = bytes();
    return std::string(b.begin(), b.end());
  }
  bool done() const { return pos_ == in_.size(); }
  /// Guards element counts read from the image against its remaining size.
  void check_count(std::uint64_t count, std::size_t min_bytes_each) {
    if (min_bytes_each != 0 && count > (in_.size() - pos_) / min_bytes_each) throw FormatError("count exceeds image size");
  }

 private:
  void need(std::size_t n) {
    if (in_.size() - pos_ < n) throw FormatError("image ends inside a record");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_tree(Writer& w, const KeyedTree& t) {
  w.u32(t.next_key());
  w.u32(static_cast<std::uint32_t>(t.size()));
  for (const auto& n : t.nodes()) {
    w.u32(n.key);
    w.u32(n.parent);
    w.u32(n.edge.offset);
    w.u32(n.edge.length);
    w.u32(n.depth);
    w.u8(n.is_marker ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(n.labels.size()));
    SuffixRef prev{0, 0};
    for (const auto& l : n.labels) {
      // Labels are sorted: sequence deltas are non-negative, and so are start
      // deltas within one sequence.
      w.u32(l.sequence - prev.sequence);
      w.u32(l.sequence == prev.sequence ? l.start - prev.start : l.start);
      prev = l;
    }
  }
}

KeyedTree read_tree(Reader& r, std::shared_ptr<const SymbolArena> arena) {
  KeyedTree t(arena);
  const std::uint32_t next_key = r.u32();
  const std::uint32_t count = r.u32();
  r.check_count(count, 25);
  auto& nodes = t.mutable_nodes();
  nodes.resize(count);
  for (auto& n : nodes) {
    n.key = r.u32();
    n.parent = r.u32();
    n.edge.offset = r.u32();
    n.edge.length = r.u32();
    n.depth = r.u32();
    n.is_marker = r.u8() != 0;
    const std::uint32_t labels = r.u32();
    r.check_count(labels, 8);
    SuffixRef prev{0, 0};
    for (std::uint32_t i = 0; i < labels; ++i) {
      SuffixRef l;
      l.sequence = prev.sequence + r.u32();
      const std::uint32_t s = r.u32();
      l.start = l.sequence == prev.sequence ? prev.start + s : s;
      if (!arena->valid(l)) throw FormatError("label outside the stored sequences");
      n.labels.push_back(l);
      prev = l;
    }
    if (n.edge.length > 0 && std::uint64_t{n.edge.offset} + n.edge.length > arena->size())
      throw FormatError("edge outside the stored sequences");
  }
  if (count == 0 || nodes[0].parent != kNoNode) throw FormatError("tree has no root");
  for (std::uint32_t i = 1; i < count; ++i) {
    auto& n = nodes[i];
    if (n.parent >= count || n.parent == i) throw FormatError("bad parent index");
    if (n.is_marker) {
      nodes[n.parent].marker = i;
    } else {
      if (n.edge.length == 0) throw FormatError("empty edge on a tree node");
      nodes[n.parent].children.emplace_back((*arena)[n.edge.offset], i);
    }
  }
  for (auto& n : nodes)
    std::sort(n.children.begin(), n.children.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  t.reindex(next_key);
  return t;
}

void write_tables(Writer& w, const ErrorTree& et) {
  std::uint32_t count = 0;
  for (const auto& v : et.tables) count += static_cast<std::uint32_t>(v.size());
  w.u32(count);
  for (std::size_t kind = 0; kind < kTableKinds; ++kind) {
    for (const auto& t : et.tables[kind]) {
      w.u8(static_cast<std::uint8_t>(kind));
      w.u32(t.level());
      // Group rows by (owner, key); each group is one record.
      std::vector<std::pair<std::size_t, std::size_t>> groups;
      for (std::size_t row = 0; row < t.size();) {
        std::size_t end = row + 1;
        while (end < t.size() && t.owner(end) == t.owner(row) &&
               std::ranges::equal(t.key(end), t.key(row)))
          ++end;
        groups.emplace_back(row, end);
        row = end;
      }
      w.u64(groups.size());
      std::vector<NodeKey> leaf_keys;
      for (const auto& [row, end] : groups) {
        w.u32(et.trie.key(t.owner(row)));
        for (KeyPart p : t.key(row)) w.u64(p);
        leaf_keys.clear();
        for (std::size_t i = row; i < end; ++i) leaf_keys.push_back(et.trie.key(t.leaf(i)));
        std::sort(leaf_keys.begin(), leaf_keys.end());
        w.u32(static_cast<std::uint32_t>(leaf_keys.size()));
        NodeKey prev = 0;
        for (NodeKey k : leaf_keys) {
          w.u32(k - prev);
          prev = k;
        }
      }
    }
  }
}

void read_tables(Reader& r, ErrorTree& et) {
  const std::uint32_t count = r.u32();
  r.check_count(count, 13);
  for (auto& v : et.tables) v.clear();
  std::vector<KeyPart> key;
  for (std::uint32_t ti = 0; ti < count; ++ti) {
    const std::uint8_t kind = r.u8();
    const std::uint32_t level = r.u32();
    if (kind >= kTableKinds || level == 0 || level > et.k) throw FormatError("bad table header");
    auto& v = et.tables[kind];
    if (v.size() != level - 1) throw FormatError("tables out of order");
    v.emplace_back(level);
    ErrorTable& t = v.back();
    const std::uint64_t groups = r.u64();
    r.check_count(groups, 8 + 8 * level);
    for (std::uint64_t g = 0; g < groups; ++g) {
      const std::uint32_t owner = et.trie.index_of(r.u32());
      if (owner == kNoNode) throw FormatError("table owner is not a trie node");
      key.resize(level);
      for (auto& p : key) p = r.u64();
      const std::uint32_t leaves = r.u32();
      r.check_count(leaves, 4);
      NodeKey prev = 0;
      for (std::uint32_t i = 0; i < leaves; ++i) {
        prev += r.u32();
        const std::uint32_t leaf = et.trie.index_of(prev);
        if (leaf == kNoNode) throw FormatError("table leaf is not a trie node");
        t.add(owner, key, leaf);
      }
    }
    t.freeze();
  }
  for (const auto& v : et.tables)
    if (v.size() != et.k && !v.empty()) throw FormatError("missing table levels");
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> serialize(const ErrorTree& et) {
  Writer body;
  body.u8(static_cast<std::uint8_t>(et.mode));
  body.u8(et.indels ? 1 : 0);
  body.u32(et.k);
  body.u32(et.m);
  body.str(et.alphabet.name());
  body.str(et.alphabet.symbols());
  body.u8(static_cast<std::uint8_t>(et.alphabet.wildcard()));
  const SymbolArena& a = *et.arena;
  body.u64(a.sequence_count());
  body.u64(et.kst.size());
  body.u64(et.trie.size());
  for (std::uint32_t id = 0; id < a.sequence_count(); ++id) body.bytes(a.sequence(id));
  write_tree(body, et.kst);
  write_tree(body, et.trie);
  write_tables(body, et);

  Writer out;
  for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u16(kFormatVersion);
  out.u64(body.data().size());
  auto& o = out.data();
  o.insert(o.end(), body.data().begin(), body.data().end());
  out.u64(fnv1a64(body.data()));
  return std::move(out.data());
}

ErrorTree deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not an index image (bad magic)");
  if (bytes.size() < kPreambleSize) throw ChecksumError("image truncated inside the header");
  Reader pre(bytes.subspan(sizeof(kMagic), kPreambleSize - sizeof(kMagic)));
  const std::uint16_t version = pre.u16();
  if (version > kFormatVersion)
    throw VersionError("image format version " + std::to_string(version) + " is newer than supported version " +
                       std::to_string(kFormatVersion));
  if (version == 0) throw FormatError("image format version 0 is invalid");
  const std::uint64_t body_len = pre.u64();
  if (bytes.size() - kPreambleSize < 8 || body_len != bytes.size() - kPreambleSize - 8)
    throw ChecksumError("image size does not match its header (truncated or padded)");
  auto body = bytes.subspan(kPreambleSize, body_len);
  Reader tail(bytes.subspan(kPreambleSize + body_len, 8));
  if (tail.u64() != fnv1a64(body)) throw ChecksumError("image checksum mismatch");

  Reader r(body);
  ErrorTree et;
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw FormatError("bad mode");
  et.mode = static_cast<IndexMode>(mode);
  et.indels = r.u8() != 0;
  et.k = r.u32();
  et.m = r.u32();
  {
    std::string name = r.str();
    std::string symbols = r.str();
    const char wildcard = static_cast<char>(r.u8());
    try {
      et.alphabet = Alphabet(name, symbols, wildcard);
    } catch (const Error& e) {
      throw FormatError(std::string("bad alphabet: ") + e.what());
    }
  }
  const std::uint64_t sequences = r.u64();
  const std::uint64_t kst_nodes = r.u64();
  const std::uint64_t trie_nodes = r.u64();
  r.check_count(sequences, 4);
  std::vector<std::vector<Symbol>> seqs;
  seqs.reserve(sequences);
  for (std::uint64_t i = 0; i < sequences; ++i) {
    auto b = r.bytes();
    seqs.emplace_back(b.begin(), b.end());
  }
  et.arena = std::make_shared<const SymbolArena>(seqs);
  et.kst = read_tree(r, et.arena);
  et.trie = read_tree(r, et.arena);
  if (et.kst.size() != kst_nodes || et.trie.size() != trie_nodes) throw FormatError("node counts disagree");
  read_tables(r, et);
  if (!r.done()) throw FormatError("trailing bytes in the image body");
  finalize_loaded(et);
  return et;
}

std::size_t save(const ErrorTree& index, const std::filesystem::path& path) {
  const auto bytes = serialize(index);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) throw IoError("write to " + path.string() + " failed");
  return bytes.size();
}

ErrorTree load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace errortree
