#include "errortree/keyed_tree.hpp"

#include <algorithm>
#include <string>

#include "errortree/errors.hpp"

namespace errortree {

namespace {

std::uint64_t pack(SuffixRef r) { return (std::uint64_t{r.sequence} << 32) | r.start; }

}  // namespace

NodeKey WalkTrace::last_node() const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->tag == EntryTag::at_node) return it->key;
  return 0;
}

KeyedTree::KeyedTree(std::shared_ptr<const SymbolArena> arena) : arena_(std::move(arena)) {}

std::uint32_t KeyedTree::index_of(NodeKey key) const noexcept {
  return key < key_index_.size() ? key_index_[key] : kNoNode;
}

std::uint32_t KeyedTree::child(std::uint32_t index, Symbol s) const noexcept {
  const auto& ch = nodes_[index].children;
  if (ch.size() <= 8) {
    for (const auto& [sym, c] : ch)
      if (sym == s) return c;
    return kNoNode;
  }
  auto it = std::lower_bound(ch.begin(), ch.end(), s, [](const auto& p, Symbol v) { return p.first < v; });
  return (it != ch.end() && it->first == s) ? it->second : kNoNode;
}

std::pair<NodeKey, EntryTag> KeyedTree::locus(Point p) const noexcept {
  if (p.remaining > 0) {
    if (symbol_at(p) == kTerminator) return {nodes_[p.node].key, EntryTag::at_node};
    return {nodes_[p.node].key, EntryTag::at_edge};
  }
  if (nodes_[p.node].depth > 0) {
    std::uint32_t t = terminator_child(p.node);
    if (t != kNoNode) return {nodes_[t].key, EntryTag::at_node};
  }
  return {nodes_[p.node].key, EntryTag::at_node};
}

std::uint32_t KeyedTree::leaf_of(SuffixRef ref) const noexcept {
  auto it = leaf_of_.find(pack(ref));
  return it == leaf_of_.end() ? kNoNode : it->second;
}

void KeyedTree::collect_labels(Point p, std::vector<SuffixRef>& out) const {
  std::vector<std::uint32_t> stack{p.node};
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    const auto& n = nodes_[u];
    out.insert(out.end(), n.labels.begin(), n.labels.end());
    for (const auto& [sym, c] : n.children) stack.push_back(c);
  }
}

std::vector<std::uint32_t> KeyedTree::leaf_counts() const {
  // Split nodes are appended, so index order is not a topological order.
  std::vector<std::uint32_t> order;
  order.reserve(nodes_.size());
  std::vector<std::uint32_t> stack{root()};
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (const auto& [sym, c] : nodes_[u].children) stack.push_back(c);
  }
  std::vector<std::uint32_t> count(nodes_.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = nodes_[*it];
    if (n.is_leaf()) count[*it] = 1;
    if (n.parent != kNoNode && !n.is_marker) count[n.parent] += count[*it];
  }
  return count;
}

std::vector<Symbol> KeyedTree::spell(std::uint32_t index) const {
  std::vector<std::uint32_t> path;
  for (std::uint32_t u = index; u != kNoNode; u = nodes_[u].parent) path.push_back(u);
  std::vector<Symbol> out;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const auto& e = nodes_[*it].edge;
    for (std::uint32_t i = 0; i < e.length; ++i) out.push_back((*arena_)[e.offset + i]);
  }
  return out;
}

std::uint32_t KeyedTree::add_node(TreeNode n) {
  unseal();
  n.key = next_key_++;
  auto idx = static_cast<std::uint32_t>(nodes_.size());
  if (key_index_.size() <= n.key) key_index_.resize(n.key + 1, kNoNode);
  key_index_[n.key] = idx;
  nodes_.push_back(std::move(n));
  return idx;
}

void KeyedTree::replace_child(std::uint32_t parent, std::uint32_t old_child, std::uint32_t new_child) {
  for (auto& [sym, c] : nodes_[parent].children)
    if (c == old_child) c = new_child;
}

void KeyedTree::seal() {
  flat_edges_.clear();
  if (nodes_.empty()) return;
  // Breadth-first, so every child list is contiguous.
  flat_edges_.push_back(FlatEdge{root(), 0, 0, 0, 0, kTerminator});
  for (std::size_t at = 0; at < flat_edges_.size(); ++at) {
    const auto& ch = nodes_[flat_edges_[at].node].children;
    if (ch.size() > UINT16_MAX) {
      flat_edges_.clear();
      return;
    }
    flat_edges_[at].first = static_cast<std::uint32_t>(flat_edges_.size());
    flat_edges_[at].count = static_cast<std::uint16_t>(ch.size());
    for (const auto& [sym, c] : ch)
      flat_edges_.push_back(FlatEdge{c, nodes_[c].edge.offset, nodes_[c].edge.length, 0, 0, sym});
  }
}

std::optional<Point> KeyedTree::match(std::span<const Symbol> s) const {
  if (flat_edges_.empty()) {
    Point q{root(), 0};
    for (Symbol c : s) {
      if (q.remaining == 0) {
        const std::uint32_t ch = child(q.node, c);
        if (ch == kNoNode) return std::nullopt;
        q = enter(ch);
      } else {
        if (symbol_at(q) != c) return std::nullopt;
        --q.remaining;
      }
    }
    return q;
  }
  // Whole edges are compared against the arena without touching nodes_.
  const Symbol* text = arena_->symbols().data();
  const FlatEdge* at = flat_edges_.data();
  std::size_t i = 0;
  while (i < s.size()) {
    const FlatEdge* e = flat_edges_.data() + at->first;
    const FlatEdge* end = e + at->count;
    while (e != end && e->symbol != s[i]) ++e;
    if (e == end) return std::nullopt;
    const auto take = static_cast<std::uint32_t>(std::min<std::size_t>(e->length, s.size() - i));
    const Symbol* label = text + e->offset;
    for (std::uint32_t t = 1; t < take; ++t)
      if (label[t] != s[i + t]) return std::nullopt;
    i += take;
    if (take < e->length) return Point{e->node, e->length - take};
    at = e;
  }
  return Point{at->node, 0};
}

NodeKey KeyedTree::ensure_keyed_point(std::uint32_t offset, std::uint32_t length) {
  unseal();
  Point p = descend(offset, length);
  std::uint32_t at = p.node;
  if (p.remaining > 0) {
    // Split the edge so the point becomes a node.
    const std::uint32_t lower = p.node;
    const std::uint32_t upper_len = nodes_[lower].edge.length - p.remaining;
    TreeNode mid;
    mid.parent = nodes_[lower].parent;
    mid.edge = EdgeLabel{nodes_[lower].edge.offset, upper_len};
    mid.depth = nodes_[lower].depth - p.remaining;
    at = add_node(std::move(mid));
    auto& low = nodes_[lower];
    low.edge.offset += upper_len;
    low.edge.length = p.remaining;
    replace_child(nodes_[at].parent, lower, at);
    low.parent = at;
    nodes_[at].children.emplace_back((*arena_)[low.edge.offset], lower);
  }
  if (std::uint32_t t = terminator_child(at); t != kNoNode) return nodes_[t].key;
  if (nodes_[at].marker != kNoNode) return nodes_[nodes_[at].marker].key;
  TreeNode leaf;
  leaf.parent = at;
  leaf.edge = EdgeLabel{nodes_[at].edge.offset + nodes_[at].edge.length, 0};
  leaf.depth = nodes_[at].depth;
  leaf.is_marker = true;
  std::uint32_t idx = add_node(std::move(leaf));
  nodes_[at].marker = idx;
  return nodes_[idx].key;
}

void KeyedTree::renumber_preorder() {
  unseal();
  std::vector<std::uint32_t> order;
  order.reserve(nodes_.size());
  std::vector<std::uint32_t> stack{root()};
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    order.push_back(u);
    const auto& ch = nodes_[u].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(it->second);
    if (nodes_[u].marker != kNoNode) stack.push_back(nodes_[u].marker);
  }
  std::vector<std::uint32_t> remap(nodes_.size(), kNoNode);
  for (std::uint32_t i = 0; i < order.size(); ++i) remap[order[i]] = i;
  std::vector<TreeNode> out;
  out.reserve(order.size());
  for (std::uint32_t old : order) {
    TreeNode n = std::move(nodes_[old]);
    n.key = remap[old];
    if (n.parent != kNoNode) n.parent = remap[n.parent];
    if (n.marker != kNoNode) n.marker = remap[n.marker];
    for (auto& [sym, c] : n.children) c = remap[c];
    out.push_back(std::move(n));
  }
  nodes_ = std::move(out);
  next_key_ = 0;
  reindex(static_cast<NodeKey>(nodes_.size()));
}

void KeyedTree::reindex(NodeKey next_key) {
  NodeKey max_key = 0;
  for (const auto& n : nodes_) max_key = std::max(max_key, n.key);
  key_index_.assign(nodes_.empty() ? 0 : max_key + 1, kNoNode);
  leaf_of_.clear();
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    key_index_[nodes_[i].key] = i;
    for (const auto& l : nodes_[i].labels) leaf_of_.emplace(pack(l), i);
  }
  next_key_ = std::max<NodeKey>(next_key, nodes_.empty() ? 0 : max_key + 1);
}

// ---------------------------------------------------------------------------
// Ukkonen construction

namespace {

class UkkonenBuilder {
 public:
  static constexpr std::int32_t kLeafEnd = -1;
  static constexpr std::int32_t kNone = -1;

  explicit UkkonenBuilder(std::vector<std::uint32_t> text) : t_(std::move(text)) {}

  struct BNode {
    std::int32_t start = 0;
    std::int32_t end = 0;  // exclusive, or kLeafEnd
    std::int32_t link = 0;
    std::vector<std::pair<std::uint32_t, std::int32_t>> next;  // sorted by symbol
  };

  void run() {
    nodes_.reserve(2 * t_.size() + 2);
    nodes_.push_back(BNode{0, 0, 0, {}});
    const auto n = static_cast<std::int32_t>(t_.size());
    std::int32_t active_node = 0, active_edge = 0, active_len = 0, remainder = 0;
    for (std::int32_t pos = 0; pos < n; ++pos) {
      end_ = pos + 1;
      ++remainder;
      std::int32_t last_internal = kNone;
      while (remainder > 0) {
        if (active_len == 0) active_edge = pos;
        const std::uint32_t c = t_[active_edge];
        std::int32_t nxt = find(active_node, c);
        if (nxt == kNone) {
          insert(active_node, c, make(pos, kLeafEnd));
          if (last_internal != kNone) {
            nodes_[last_internal].link = active_node;
            last_internal = kNone;
          }
        } else {
          const std::int32_t el = edge_len(nxt);
          if (active_len >= el) {
            active_edge += el;
            active_len -= el;
            active_node = nxt;
            continue;
          }
          if (t_[nodes_[nxt].start + active_len] == t_[pos]) {
            if (last_internal != kNone && active_node != 0) {
              nodes_[last_internal].link = active_node;
              last_internal = kNone;
            }
            ++active_len;
            break;
          }
          const std::int32_t split = make(nodes_[nxt].start, nodes_[nxt].start + active_len);
          set_child(active_node, c, split);
          insert(split, t_[pos], make(pos, kLeafEnd));
          nodes_[nxt].start += active_len;
          insert(split, t_[nodes_[nxt].start], nxt);
          if (last_internal != kNone) nodes_[last_internal].link = split;
          last_internal = split;
        }
        --remainder;
        if (active_node == 0 && active_len > 0) {
          --active_len;
          active_edge = pos - remainder + 1;
        } else if (active_node != 0) {
          active_node = nodes_[active_node].link;
        }
      }
    }
  }

  const std::vector<BNode>& nodes() const { return nodes_; }
  std::int32_t edge_end(std::int32_t i) const { return nodes_[i].end == kLeafEnd ? end_ : nodes_[i].end; }

 private:
  std::int32_t make(std::int32_t start, std::int32_t end) {
    nodes_.push_back(BNode{start, end, 0, {}});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t edge_len(std::int32_t i) const { return edge_end(i) - nodes_[i].start; }
  std::int32_t find(std::int32_t node, std::uint32_t c) const {
    const auto& v = nodes_[node].next;
    auto it = std::lower_bound(v.begin(), v.end(), c, [](const auto& p, std::uint32_t x) { return p.first < x; });
    return (it != v.end() && it->first == c) ? it->second : kNone;
  }
  void insert(std::int32_t node, std::uint32_t c, std::int32_t child) {
    auto& v = nodes_[node].next;
    auto it = std::lower_bound(v.begin(), v.end(), c, [](const auto& p, std::uint32_t x) { return p.first < x; });
    v.insert(it, {c, child});
  }
  void set_child(std::int32_t node, std::uint32_t c, std::int32_t child) {
    auto& v = nodes_[node].next;
    auto it = std::lower_bound(v.begin(), v.end(), c, [](const auto& p, std::uint32_t x) { return p.first < x; });
    it->second = child;
  }

  std::vector<std::uint32_t> t_;
  std::vector<BNode> nodes_;
  std::int32_t end_ = 0;
};

}  // namespace

KeyedTree build_gst(std::shared_ptr<const SymbolArena> arena) {
  const SymbolArena& a = *arena;
  if (a.sequence_count() == 0 || a.total_length() == 0) throw ParameterError("build_gst: empty input");

  // Unique terminators make every suffix end at its own leaf during construction.
  std::vector<std::uint32_t> text(a.size());
  std::vector<std::uint32_t> term_pos(a.sequence_count());
  for (std::uint32_t id = 0; id < a.sequence_count(); ++id) {
    const std::uint32_t off = a.offset(id);
    const std::uint32_t len = a.length(id);
    for (std::uint32_t i = 0; i < len; ++i) text[off + i] = a[off + i];
    text[off + len] = 256 + id;
    term_pos[id] = off + len;
  }
  UkkonenBuilder b(std::move(text));
  b.run();
  const auto& bn = b.nodes();

  KeyedTree tree(arena);
  auto& out = tree.mutable_nodes();
  out.reserve(bn.size());

  struct Frame {
    std::int32_t b;
    std::uint32_t parent;
    std::uint32_t parent_depth;
  };
  out.push_back(TreeNode{});
  std::vector<Frame> stack;
  auto leaf_label = [&](std::int32_t leaf, std::uint32_t parent_depth) {
    const auto q = static_cast<std::uint32_t>(bn[leaf].start) - parent_depth;
    SuffixRef r = a.locate(q);
    return r;
  };
  auto expand = [&](std::int32_t bnode, std::uint32_t self, std::uint32_t self_depth) -> std::size_t {
    // Children of `bnode` below output node `self`. Terminator-only leaves are merged.
    std::vector<SuffixRef> term_labels;
    std::uint32_t term_offset = 0;
    std::size_t pushed = 0;
    for (const auto& [sym, c] : bn[bnode].next) {
      if (sym >= 256) {
        term_labels.push_back(leaf_label(c, self_depth));
        term_offset = static_cast<std::uint32_t>(bn[c].start);
      } else {
        stack.push_back(Frame{c, self, self_depth});
        ++pushed;
      }
    }
    if (!term_labels.empty()) {
      std::sort(term_labels.begin(), term_labels.end());
      TreeNode leaf;
      leaf.parent = self;
      leaf.edge = EdgeLabel{term_offset, 1};
      leaf.depth = self_depth + 1;
      leaf.labels = std::move(term_labels);
      out.push_back(std::move(leaf));
      out[self].children.emplace_back(kTerminator, static_cast<std::uint32_t>(out.size() - 1));
    }
    return pushed;
  };
  expand(0, 0, 0);
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const auto& n = bn[f.b];
    TreeNode node;
    node.parent = f.parent;
    const auto first = static_cast<std::uint32_t>(n.start);
    const auto self = static_cast<std::uint32_t>(out.size());
    if (n.end == UkkonenBuilder::kLeafEnd) {
      SuffixRef r = leaf_label(f.b, f.parent_depth);
      const std::uint32_t tp = term_pos[r.sequence];
      node.edge = EdgeLabel{first, tp - first + 1};
      node.depth = f.parent_depth + node.edge.length;
      node.labels.push_back(r);
      out.push_back(std::move(node));
    } else {
      node.edge = EdgeLabel{first, static_cast<std::uint32_t>(n.end - n.start)};
      node.depth = f.parent_depth + node.edge.length;
      const std::uint32_t d = node.depth;
      out.push_back(std::move(node));
      const std::size_t pushed = expand(f.b, self, d);
      // All children were identical suffixes: collapse into a single leaf.
      auto& me = out[self];
      if (pushed == 0 && me.children.size() == 1) {
        const std::uint32_t leaf = me.children.front().second;
        me.labels = std::move(out[leaf].labels);
        me.children.clear();
        const SuffixRef r = me.labels.front();
        const std::uint32_t so = a.offset(r);
        const std::uint32_t tp = term_pos[r.sequence];
        me.edge = EdgeLabel{so + f.parent_depth, tp - so - f.parent_depth + 1};
        me.depth = f.parent_depth + me.edge.length;
        out.pop_back();  // the merged terminator leaf was the last node added
      }
    }
    out[f.parent].children.emplace_back(a[first], self);
  }
  for (auto& n : out)
    std::sort(n.children.begin(), n.children.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  tree.renumber_preorder();
  return tree;
}

// ---------------------------------------------------------------------------
// Walks

namespace {

WalkTrace walk(const KeyedTree& tree, std::span<const Symbol> s, std::uint32_t max_jumps) {
  WalkTrace tr;
  tr.entries.reserve(2 * std::min<std::size_t>(s.size(), 24) + 4);
  Point p{KeyedTree::root(), 0};
  tr.entries.push_back(WalkEntry{EntryTag::at_node, tree.key(p.node), 0});
  std::uint32_t consumed = 0;
  std::size_t i = 0;
  bool fell = false;
  while (i < s.size()) {
    const Symbol c = s[i];
    if (p.remaining == 0) {
      std::uint32_t ch = (c == kTerminator || c == kWildcard) ? kNoNode : tree.child(p.node, c);
      if (ch == kNoNode && !tree.is_branch(p.node) && !tree.node(p.node).children.empty() &&
          tree.node(p.node).children.front().first != kTerminator && tr.jumps.size() < max_jumps) {
        // A unary node behaves like an edge interior.
        tr.jumps.push_back(static_cast<std::uint32_t>(i + 1));
        ch = tree.node(p.node).children.front().second;
      }
      if (ch == kNoNode) {
        fell = true;
        break;
      }
      p = tree.enter(ch);
      consumed = 1;
    } else {
      const Symbol e = tree.symbol_at(p);
      if (e == kTerminator) {
        fell = true;
        break;
      }
      if (e != c) {
        if (tr.jumps.size() >= max_jumps) {
          fell = true;
          break;
        }
        tr.jumps.push_back(static_cast<std::uint32_t>(i + 1));
      }
      --p.remaining;
      ++consumed;
    }
    ++i;
    if (p.remaining == 0) {
      tr.entries.push_back(WalkEntry{EntryTag::at_edge, tree.key(p.node), consumed});
      tr.entries.push_back(WalkEntry{EntryTag::at_node, tree.key(p.node), 0});
      consumed = 0;
    }
  }
  tr.matched_len = static_cast<std::uint32_t>(i);
  tr.end = p;
  if (fell) {
    if (consumed > 0) tr.entries.push_back(WalkEntry{EntryTag::at_edge, tree.key(p.node), consumed});
    tr.terminal = Terminal::fell_off;
    return tr;
  }
  if (p.remaining > 0) {
    tr.entries.push_back(WalkEntry{EntryTag::at_edge, tree.key(p.node), consumed});
    if (tree.symbol_at(p) == kTerminator) {
      tr.entries.push_back(WalkEntry{EntryTag::at_node, tree.key(p.node), 0});
      tr.terminal = Terminal::at_node;
    } else {
      tr.terminal = Terminal::at_edge;
    }
    return tr;
  }
  tr.terminal = Terminal::at_node;
  if (tree.depth(p) > 0) {
    if (std::uint32_t t = tree.terminator_child(p.node); t != kNoNode) {
      tr.entries.push_back(WalkEntry{EntryTag::at_edge, tree.key(t), 0});
      tr.entries.push_back(WalkEntry{EntryTag::at_node, tree.key(t), 0});
    }
  }
  return tr;
}

}  // namespace

WalkTrace avn(const KeyedTree& tree, std::span<const Symbol> s) { return walk(tree, s, 0); }

WalkTrace avnj(const KeyedTree& tree, std::span<const Symbol> s, std::uint32_t k) { return walk(tree, s, k); }

NodeKey avn_last(const KeyedTree& tree, SuffixRef ref) {
  std::uint32_t leaf = tree.leaf_of(ref);
  if (leaf == kNoNode)
    throw LookupError("suffix (" + std::to_string(ref.sequence) + ", " + std::to_string(ref.start) +
                      ") is not indexed");
  return tree.key(leaf);
}

// ---------------------------------------------------------------------------
// Trimming and keyed points

KeyedTree trim_to_depth(const KeyedTree& tree, std::uint32_t m) {
  if (m == 0) throw ParameterError("trim_to_depth: m must be >= 1");
  KeyedTree out(tree.arena_ptr());
  auto& nodes = out.mutable_nodes();
  NodeKey fresh = tree.next_key();

  auto hoist = [&](std::uint32_t from, std::vector<SuffixRef>& labels) {
    tree.collect_labels(Point{from, 0}, labels);
    std::sort(labels.begin(), labels.end());
  };

  struct Frame {
    std::uint32_t src;
    std::uint32_t dst_parent;
  };
  {
    TreeNode r = tree.node(0);
    r.children.clear();
    r.marker = kNoNode;
    nodes.push_back(std::move(r));
  }
  std::vector<Frame> stack;
  for (auto it = tree.node(0).children.rbegin(); it != tree.node(0).children.rend(); ++it)
    stack.push_back(Frame{it->second, 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const TreeNode& src = tree.node(f.src);
    const std::uint32_t parent_depth = nodes[f.dst_parent].depth;
    TreeNode n;
    n.parent = f.dst_parent;
    const auto self = static_cast<std::uint32_t>(nodes.size());
    if (src.depth <= m) {
      n.key = src.key;
      n.edge = src.edge;
      n.depth = src.depth;
      if (src.depth == m && !src.is_leaf()) {
        hoist(f.src, n.labels);
      } else {
        n.labels = src.labels;
        for (auto it = src.children.rbegin(); it != src.children.rend(); ++it)
          stack.push_back(Frame{it->second, self});
      }
    } else {
      n.key = fresh++;
      n.edge = EdgeLabel{src.edge.offset, m - parent_depth};
      n.depth = m;
      hoist(f.src, n.labels);
    }
    nodes.push_back(std::move(n));
    nodes[f.dst_parent].children.emplace_back(tree.arena()[src.edge.offset], self);
  }
  for (auto& n : nodes)
    std::sort(n.children.begin(), n.children.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  out.reindex(fresh);
  return out;
}

std::optional<NodeKey> ensure_leaf_at(KeyedTree& tree, SuffixRef ref, std::uint32_t levels_up) {
  if (levels_up == 0) throw ParameterError("ensure_leaf_at: levels_up must be >= 1");
  const std::uint32_t off = tree.arena().offset(ref);
  const std::uint32_t len = tree.arena().length(ref.sequence) - ref.start + 1;
  if (levels_up > len) return std::nullopt;
  return tree.ensure_keyed_point(off, len - levels_up);
}

}  // namespace errortree
