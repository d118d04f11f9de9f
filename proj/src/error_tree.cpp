#include "errortree/error_tree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "errortree/errors.hpp"

namespace errortree {

TableKind kind_of(std::span<const KeyPart> parts) noexcept {
  bool sub = false, shift = false;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    switch (part_tag(parts[i])) {
      case PartTag::sub: sub = true; break;
      case PartTag::del:
      case PartTag::ins: shift = true; break;
      default: break;
    }
  }
  if (shift && sub) return TableKind::edit;
  return shift ? TableKind::ins : TableKind::sub;
}

const char* kind_name(TableKind kind) noexcept {
  switch (kind) {
    case TableKind::sub: return "sub";
    case TableKind::ins: return "ins";
    case TableKind::edit: return "edit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ErrorTable

void ErrorTable::add(std::uint32_t owner, std::span<const KeyPart> key, std::uint32_t leaf) {
  owners_.push_back(owner);
  parts_.insert(parts_.end(), key.begin(), key.end());
  leaves_.push_back(leaf);
}

void ErrorTable::clear() {
  owners_.clear();
  parts_.clear();
  leaves_.clear();
  owner_start_.clear();
}

void ErrorTable::freeze() {
  const std::size_t n = leaves_.size();
  auto less = [&](std::uint32_t a, std::uint32_t b) {
    for (std::uint32_t i = 0; i < level_; ++i) {
      const KeyPart x = parts_[a * level_ + i], y = parts_[b * level_ + i];
      if (x != y) return x < y;
    }
    return leaves_[a] < leaves_[b];
  };
  auto same = [&](std::uint32_t a, std::uint32_t b) { return !less(a, b) && !less(b, a); };
  // Bucket rows by owner, then sort each owner's rows by key and leaf.
  const std::uint32_t owner_end = n == 0 ? 0 : *std::max_element(owners_.begin(), owners_.end()) + 1;
  std::vector<std::uint32_t> bucket(owner_end + 1, 0);
  for (std::uint32_t o : owners_) ++bucket[o + 1];
  std::partial_sum(bucket.begin(), bucket.end(), bucket.begin());
  std::vector<std::uint32_t> perm(n);
  {
    std::vector<std::uint32_t> fill(bucket.begin(), bucket.end() - 1);
    for (std::uint32_t r = 0; r < n; ++r) perm[fill[owners_[r]]++] = r;
  }
  std::size_t kept = 0;
  for (std::uint32_t o = 0; o < owner_end; ++o) {
    const auto first = perm.begin() + bucket[o], last = perm.begin() + bucket[o + 1];
    std::sort(first, last, less);
    const auto end = std::unique(first, last, same);
    kept = static_cast<std::size_t>(std::move(first, end, perm.begin() + static_cast<std::ptrdiff_t>(kept)) - perm.begin());
  }
  perm.resize(kept);
  std::vector<std::uint32_t> owners, leaves;
  std::vector<KeyPart> parts;
  owners.reserve(perm.size());
  leaves.reserve(perm.size());
  parts.reserve(perm.size() * level_);
  for (std::uint32_t r : perm) {
    owners.push_back(owners_[r]);
    leaves.push_back(leaves_[r]);
    parts.insert(parts.end(), parts_.begin() + r * level_, parts_.begin() + (r + 1) * level_);
  }
  owners_ = std::move(owners);
  leaves_ = std::move(leaves);
  parts_ = std::move(parts);
  owner_start_.assign(owners_.empty() ? 0 : owners_.back() + 2, 0);
  for (std::uint32_t o : owners_) ++owner_start_[o + 1];
  std::partial_sum(owner_start_.begin(), owner_start_.end(), owner_start_.begin());
}

int ErrorTable::compare_row(std::size_t row, std::uint32_t owner, std::span<const KeyPart> key) const {
  if (owners_[row] != owner) return owners_[row] < owner ? -1 : 1;
  const KeyPart* p = parts_.data() + row * level_;
  for (std::uint32_t i = 0; i < level_; ++i)
    if (p[i] != key[i]) return p[i] < key[i] ? -1 : 1;
  return 0;
}

std::span<const std::uint32_t> ErrorTable::lookup(std::uint32_t owner, std::span<const KeyPart> key) const {
  if (key.size() != level_ || !has_owner(owner)) return {};
  std::size_t lo = owner_start_[owner], hi = owner_start_[owner + 1];
  const std::size_t last = hi;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (compare_row(mid, owner, key) < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  std::size_t end = lo;
  while (end < last && compare_row(end, owner, key) == 0) ++end;
  return std::span<const std::uint32_t>(leaves_).subspan(lo, end - lo);
}

bool ErrorTable::has_owner(std::uint32_t owner) const {
  return owner + 1 < owner_start_.size() && owner_start_[owner] != owner_start_[owner + 1];
}

const ErrorTable* ErrorTree::table(TableKind kind, std::uint32_t level) const noexcept {
  const auto& v = tables[static_cast<std::size_t>(kind)];
  if (level == 0 || level > v.size()) return nullptr;
  return &v[level - 1];
}

// ---------------------------------------------------------------------------
// Compact trie

KeyedTree build_compact_trie(std::shared_ptr<const SymbolArena> arena) {
  const SymbolArena& a = *arena;
  if (a.sequence_count() == 0) throw ParameterError("empty dictionary");
  const auto count = static_cast<std::uint32_t>(a.sequence_count());
  // Terminated sequences, so a prefix sorts after its extensions.
  auto terminated = [&](std::uint32_t id) { return a.symbols().subspan(a.offset(id), a.length(id) + 1); };
  std::vector<std::uint32_t> ids(count);
  std::iota(ids.begin(), ids.end(), 0u);
  std::stable_sort(ids.begin(), ids.end(), [&](std::uint32_t x, std::uint32_t y) {
    auto sx = terminated(x), sy = terminated(y);
    return std::lexicographical_compare(sx.begin(), sx.end(), sy.begin(), sy.end());
  });

  KeyedTree trie(arena);
  auto& nodes = trie.mutable_nodes();
  nodes.push_back(TreeNode{});
  std::vector<std::uint32_t> stack{0};
  std::uint32_t prev = kNoNode;
  for (std::uint32_t id : ids) {
    auto s = terminated(id);
    if (prev != kNoNode) {
      auto p = terminated(prev);
      if (std::equal(s.begin(), s.end(), p.begin(), p.end())) {
        nodes[stack.back()].labels.push_back(SuffixRef{id, 1});
        continue;
      }
    }
    std::uint32_t lcp = 0;
    if (prev != kNoNode) {
      auto p = terminated(prev);
      while (lcp < s.size() && lcp < p.size() && s[lcp] == p[lcp]) ++lcp;
    }
    std::uint32_t last = kNoNode;
    while (nodes[stack.back()].depth > lcp) {
      last = stack.back();
      stack.pop_back();
    }
    std::uint32_t parent = stack.back();
    if (nodes[parent].depth < lcp) {
      // Split the edge into `last` at depth lcp.
      TreeNode mid;
      mid.parent = parent;
      const std::uint32_t upper = lcp - nodes[parent].depth;
      mid.edge = EdgeLabel{nodes[last].edge.offset, upper};
      mid.depth = lcp;
      const auto mid_index = static_cast<std::uint32_t>(nodes.size());
      nodes.push_back(std::move(mid));
      auto& low = nodes[last];
      low.edge.offset += upper;
      low.edge.length -= upper;
      low.parent = mid_index;
      nodes[parent].children.back().second = mid_index;
      nodes[mid_index].children.emplace_back(a[low.edge.offset], last);
      stack.push_back(mid_index);
      parent = mid_index;
    }
    TreeNode leaf;
    leaf.parent = parent;
    leaf.edge = EdgeLabel{a.offset(id) + lcp, static_cast<std::uint32_t>(s.size()) - lcp};
    leaf.depth = static_cast<std::uint32_t>(s.size());
    leaf.labels.push_back(SuffixRef{id, 1});
    const auto leaf_index = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(std::move(leaf));
    nodes[parent].children.emplace_back(s[lcp], leaf_index);
    stack.push_back(leaf_index);
    prev = id;
  }
  for (auto& n : nodes) std::sort(n.labels.begin(), n.labels.end());
  trie.renumber_preorder();
  return trie;
}

std::vector<std::uint32_t> heavy_children(const KeyedTree& trie) {
  const auto counts = trie.leaf_counts();
  std::vector<std::uint32_t> heavy(trie.size(), kNoNode);
  for (std::uint32_t i = 0; i < trie.size(); ++i) {
    std::uint32_t best = kNoNode;
    for (const auto& [sym, c] : trie.node(i).children)
      if (best == kNoNode || counts[c] > counts[best]) best = c;
    heavy[i] = best;
  }
  return heavy;
}

void index_lengths(ErrorTree& et) {
  et.lengths_below.clear();
  et.light_lengths.clear();
  if (et.mode != IndexMode::dictionary) return;
  const KeyedTree& trie = et.trie;
  std::vector<std::uint32_t> order{KeyedTree::root()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& ch : trie.node(order[i]).children) order.push_back(ch.second);
  et.lengths_below.assign(trie.size(), 0);
  et.light_lengths.assign(trie.size(), 0);
  // Children come after their parent in `order`, so a reverse pass sees them first.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::uint32_t u = *it;
    const auto& n = trie.node(u);
    if (n.is_leaf()) {
      // The leaf edge ends with the terminator.
      if (n.depth > 0) et.lengths_below[u] = length_bit(n.depth - 1);
      continue;
    }
    for (const auto& [sym, c] : n.children) {
      et.lengths_below[u] |= et.lengths_below[c];
      if (c != et.heavy[u]) et.light_lengths[u] |= et.lengths_below[c];
    }
  }
}

// ---------------------------------------------------------------------------
// Data-side keys

namespace {

using KeySink = std::function<void(std::span<const KeyPart>)>;

void enumerate_segment(const KeyedTree& kst, std::uint32_t offset, std::uint32_t length, std::uint32_t budget,
                       bool indels, std::vector<KeyPart>& prefix, const KeySink& sink) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> branches;  // (node, relative depth)
  const Point end = kst.descend(offset, length, [&](std::uint32_t u) {
    if (budget > 0 && kst.is_branch(u)) branches.emplace_back(u, kst.node(u).depth);
  });
  const auto [key, tag] = kst.locus(end);
  prefix.push_back(make_part(key, tag == EntryTag::at_node ? PartTag::at_node : PartTag::at_edge));
  sink(prefix);
  prefix.pop_back();
  for (const auto& [u, t] : branches) {
    const NodeKey uk = kst.key(u);
    auto recurse = [&](PartTag op, std::uint32_t skip) {
      prefix.push_back(make_part(uk, op));
      enumerate_segment(kst, offset + skip, length - skip, budget - 1, indels, prefix, sink);
      prefix.pop_back();
    };
    if (t < length) recurse(PartTag::sub, t + 1);
    if (!indels) continue;
    if (t < length) recurse(PartTag::del, t + 1);
    recurse(PartTag::ins, t);
  }
}

struct Pair {
  std::uint32_t owner;
  std::uint32_t leaf;
  SuffixRef rep;
};

// (trie node, non-heavy descendant leaf) pairs with each leaf's representative.
std::vector<Pair> table_pairs(const ErrorTree& et) {
  std::vector<Pair> pairs;
  const KeyedTree& trie = et.trie;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t v = 0; v < trie.size(); ++v) {
    const auto& node = trie.node(v);
    if (node.is_leaf()) continue;
    for (const auto& [sym, c] : node.children) {
      if (c == et.heavy[v]) continue;
      stack.assign(1, c);
      while (!stack.empty()) {
        std::uint32_t u = stack.back();
        stack.pop_back();
        const auto& un = trie.node(u);
        if (un.is_leaf() && !un.labels.empty()) pairs.push_back(Pair{v, u, un.labels.front()});
        for (const auto& ch : un.children) stack.push_back(ch.second);
      }
    }
  }
  return pairs;
}

// Arena segments (offset, length) whose keys the pair contributes.
template <class F>
void pair_segments(const ErrorTree& et, const Pair& pr, F&& f) {
  const SymbolArena& a = *et.arena;
  const std::uint32_t d = et.trie.node(pr.owner).depth;
  const std::uint32_t avail = a.length(pr.rep.sequence) - pr.rep.start + 1;
  const std::uint32_t base = a.offset(pr.rep);
  if (et.mode == IndexMode::dictionary) {
    if (avail < d + 1) return;
    f(base + d + 1, avail - d - 1);
    return;
  }
  std::uint32_t lo = et.m, hi = et.m;
  if (et.indels) {
    lo = et.m > et.k ? et.m - et.k : 0;
    hi = et.m + et.k;
  }
  lo = std::max(lo, d + 1);
  hi = std::min(hi, avail);
  for (std::uint32_t len = lo; len <= hi; ++len) f(base + d + 1, len - d - 1);
}

void place_markers(ErrorTree& et) {
  if (et.markers_placed) return;
  const auto pairs = table_pairs(et);
  std::set<std::pair<std::uint32_t, std::uint32_t>> points;
  const SymbolArena& a = *et.arena;
  for (const auto& pr : pairs) {
    const std::uint32_t d = et.trie.node(pr.owner).depth;
    const std::uint32_t avail = a.length(pr.rep.sequence) - pr.rep.start + 1;
    if (avail < d + 1) continue;
    const std::uint32_t tail_offset = a.offset(pr.rep) + d + 1;
    // The tail ends at the sequence end (dictionary) or at the window end (text).
    std::uint32_t tail_len = avail - d - 1;
    if (et.mode == IndexMode::text) {
      if (et.m < d + 1 || avail < et.m) continue;
      tail_len = et.m - d - 1;
    }
    for (std::uint32_t j = 1; j <= et.k && j <= tail_len; ++j) points.emplace(tail_offset, tail_len - j);
  }
  for (const auto& [off, len] : points) et.kst.ensure_keyed_point(off, len);
  et.markers_placed = true;
}

using Filter = std::function<bool(TableKind, std::uint32_t)>;

void run_pass(ErrorTree& et, const Filter& filter) {
  for (auto& v : et.tables) {
    if (v.size() < et.k) {
      const auto old = static_cast<std::uint32_t>(v.size());
      for (std::uint32_t lvl = old + 1; lvl <= et.k; ++lvl) v.emplace_back(lvl);
    }
  }
  // Rebuild only the tables the filter selects.
  for (std::size_t kind = 0; kind < kTableKinds; ++kind)
    for (std::uint32_t lvl = 1; lvl <= et.k; ++lvl)
      if (filter(static_cast<TableKind>(kind), lvl)) et.tables[kind][lvl - 1].clear();
  if (et.k == 0) return;

  const auto pairs = table_pairs(et);
  std::vector<KeyPart> prefix;
  for (const auto& pr : pairs) {
    KeySink sink = [&](std::span<const KeyPart> key) {
      const TableKind kind = kind_of(key);
      const auto lvl = static_cast<std::uint32_t>(key.size());
      if (!filter(kind, lvl)) return;
      et.tables[static_cast<std::size_t>(kind)][lvl - 1].add(pr.owner, key, pr.leaf);
    };
    pair_segments(et, pr, [&](std::uint32_t off, std::uint32_t len) {
      enumerate_segment(et.kst, off, len, et.k - 1, et.indels, prefix, sink);
    });
  }
  for (std::size_t kind = 0; kind < kTableKinds; ++kind)
    for (std::uint32_t lvl = 1; lvl <= et.k; ++lvl)
      if (filter(static_cast<TableKind>(kind), lvl)) et.tables[kind][lvl - 1].freeze();
}

void check_ready(const ErrorTree& et) {
  if (!et.arena || et.trie.size() == 0 || et.kst.size() == 0) throw ParameterError("error tree has no trees yet");
  if (et.heavy.size() != et.trie.size()) throw ParameterError("heavy children not computed");
}

}  // namespace

std::vector<std::vector<KeyPart>> segment_keys(const KeyedTree& kst, std::uint32_t offset, std::uint32_t length,
                                               std::uint32_t budget, bool indels) {
  std::vector<std::vector<KeyPart>> out;
  std::vector<KeyPart> prefix;
  enumerate_segment(kst, offset, length, budget, indels, prefix,
                    [&](std::span<const KeyPart> key) { out.emplace_back(key.begin(), key.end()); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void build_level_1(ErrorTree& et) {
  check_ready(et);
  run_pass(et, [](TableKind kind, std::uint32_t lvl) { return kind == TableKind::sub && lvl == 1; });
}

void build_level_k(ErrorTree& et, std::uint32_t level) {
  check_ready(et);
  if (level == 0 || level > et.k) throw ParameterError("build_level_k: level outside 1..k");
  run_pass(et, [level](TableKind kind, std::uint32_t lvl) { return kind == TableKind::sub && lvl == level; });
}

void build_indel_tables(ErrorTree& et, std::uint32_t k) {
  check_ready(et);
  if (k > et.k) throw ParameterError("build_indel_tables: k exceeds the index budget");
  if (k == 0) return;
  if (et.mode == IndexMode::text && !et.indels)
    throw CapabilityError("text index was trimmed without room for indels; rebuild with indels enabled");
  const bool had_markers = et.markers_placed;
  et.indels = true;
  place_markers(et);
  if (!had_markers) {
    // New markers change the suffix tree, so every key must be recomputed.
    run_pass(et, [k](TableKind kind, std::uint32_t lvl) { return kind == TableKind::sub || lvl <= k; });
    return;
  }
  run_pass(et, [k](TableKind kind, std::uint32_t lvl) { return kind != TableKind::sub && lvl <= k; });
}

namespace {

ErrorTree make_base(const Alphabet& alphabet, const BuildOptions& options) {
  ErrorTree et;
  et.mode = options.mode;
  et.alphabet = alphabet;
  et.k = options.k;
  et.indels = options.indels && options.k > 0;
  et.m = options.mode == IndexMode::text ? options.m : 0;
  return et;
}

void check_symbols(const Alphabet& alphabet, const std::vector<Symbol>& s, std::size_t id) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] >= alphabet.size())
      throw InputError("sequence " + std::to_string(id) + " offset " + std::to_string(i + 1) +
                       ": symbol outside the alphabet");
}

void build_all_tables(ErrorTree& et) {
  if (et.indels) place_markers(et);
  run_pass(et, [](TableKind, std::uint32_t) { return true; });
}

}  // namespace

ErrorTree build_dictionary(const Alphabet& alphabet, const std::vector<std::vector<Symbol>>& sequences,
                           const BuildOptions& options) {
  if (sequences.empty()) throw ParameterError("empty dictionary");
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].empty()) throw InputError("sequence " + std::to_string(i) + " is empty");
    check_symbols(alphabet, sequences[i], i);
  }
  ErrorTree et = make_base(alphabet, options);
  et.mode = IndexMode::dictionary;
  et.m = 0;
  et.arena = std::make_shared<const SymbolArena>(sequences);
  et.kst = build_gst(et.arena);
  et.trie = build_compact_trie(et.arena);
  et.heavy = heavy_children(et.trie);
  index_lengths(et);
  build_all_tables(et);
  et.kst.seal();
  return et;
}

ErrorTree build_text(const Alphabet& alphabet, const std::vector<Symbol>& text, const BuildOptions& options) {
  if (text.empty()) throw InputError("empty text");
  if (options.m == 0) throw ParameterError("text mode needs m >= 1");
  check_symbols(alphabet, text, 0);
  ErrorTree et = make_base(alphabet, options);
  et.mode = IndexMode::text;
  et.arena = std::make_shared<const SymbolArena>(std::vector<std::vector<Symbol>>{text});
  et.kst = build_gst(et.arena);
  et.trie = trim_to_depth(et.kst, et.trie_depth());
  et.heavy = heavy_children(et.trie);
  index_lengths(et);
  build_all_tables(et);
  et.kst.seal();
  return et;
}

ErrorTree build_index(const Alphabet& alphabet, const std::vector<std::vector<Symbol>>& sequences,
                      const BuildOptions& options) {
  if (options.mode == IndexMode::dictionary) return build_dictionary(alphabet, sequences, options);
  if (sequences.size() != 1) throw InputError("text mode expects exactly one text");
  return build_text(alphabet, sequences.front(), options);
}

void finalize_loaded(ErrorTree& et) {
  et.kst.reindex(et.kst.next_key());
  et.trie.reindex(et.trie.next_key());
  et.heavy = heavy_children(et.trie);
  index_lengths(et);
  et.markers_placed = et.indels;
  et.kst.seal();
}

std::size_t table_entries(const ErrorTree& et, TableKind kind, std::uint32_t level) {
  const ErrorTable* t = et.table(kind, level);
  return t ? t->size() : 0;
}

TableStats stats(const ErrorTree& et) {
  TableStats s;
  s.kst_nodes = et.kst.size();
  s.trie_nodes = et.trie.size();
  for (const auto& n : et.trie.nodes()) s.trie_leaves += n.is_leaf() ? 1 : 0;
  if (et.arena) {
    s.sequences = et.arena->sequence_count();
    s.total_length = et.arena->total_length();
  }
  for (std::size_t kind = 0; kind < kTableKinds; ++kind) {
    s.entries[kind].assign(et.k, 0);
    for (std::uint32_t lvl = 1; lvl <= et.k && lvl <= et.tables[kind].size(); ++lvl) {
      const auto& t = et.tables[kind][lvl - 1];
      s.entries[kind][lvl - 1] = t.size();
      s.total_entries += t.size();
      s.table_bytes += t.bytes();
    }
  }
  auto tree_bytes = [](const KeyedTree& t) {
    std::size_t b = 0;
    for (const auto& n : t.nodes())
      b += sizeof(TreeNode) + n.children.size() * sizeof(n.children[0]) + n.labels.size() * sizeof(SuffixRef);
    return b;
  };
  s.tree_bytes = tree_bytes(et.kst) + tree_bytes(et.trie) + (et.arena ? et.arena->size() : 0);
  return s;
}

}  // namespace errortree
