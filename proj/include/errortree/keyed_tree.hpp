#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errortree/alphabet.hpp"
#include "errortree/arena.hpp"

namespace errortree {

using NodeKey = std::uint32_t;
inline constexpr std::uint32_t kNoNode = 0xFFFFFFFFu;

/// Incoming edge label: arena[offset, offset + length).
struct EdgeLabel {
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
};

struct TreeNode {
  NodeKey key = 0;
  std::uint32_t parent = kNoNode;
  EdgeLabel edge;
  /// Symbols from the root to the bottom of this node's edge, terminator included.
  std::uint32_t depth = 0;
  /// Sorted by symbol; kTerminator (0xFF) sorts last.
  std::vector<std::pair<Symbol, std::uint32_t>> children;
  /// Suffixes (or text start positions) ending at this leaf.
  std::vector<SuffixRef> labels;
  /// Marker leaf created by ensure_leaf_at; not a child for walking purposes.
  std::uint32_t marker = kNoNode;
  bool is_marker = false;

  bool is_leaf() const noexcept { return children.empty(); }
};

/// A position in the tree: `remaining` symbols of `node`'s edge are still
/// ahead. remaining == 0 means the walk stands exactly at `node`.
struct Point {
  std::uint32_t node = 0;
  std::uint32_t remaining = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class EntryTag : std::uint8_t { at_node, at_edge };

/// One item of an AVN trace. at_node: `key` is the visited node.
/// at_edge: `length` symbols were consumed on the edge into node `key`.
struct WalkEntry {
  EntryTag tag = EntryTag::at_node;
  NodeKey key = 0;
  std::uint32_t length = 0;

  friend bool operator==(const WalkEntry&, const WalkEntry&) = default;
};

enum class Terminal : std::uint8_t { at_node, at_edge, fell_off };

struct WalkTrace {
  std::vector<WalkEntry> entries;
  /// 1-based positions in the walked string where a mid-edge jump was taken.
  std::vector<std::uint32_t> jumps;
  std::uint32_t matched_len = 0;
  Terminal terminal = Terminal::at_node;
  /// Where the walk stopped.
  Point end;

  /// Key of the last at_node entry.
  NodeKey last_node() const;
};

/// Suffix tree, compact trie or trimmed suffix tree whose every node carries
/// a unique key. Edges reference a shared SymbolArena.
class KeyedTree {
 public:
  KeyedTree() = default;
  explicit KeyedTree(std::shared_ptr<const SymbolArena> arena);

  const SymbolArena& arena() const noexcept { return *arena_; }
  const std::shared_ptr<const SymbolArena>& arena_ptr() const noexcept { return arena_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  static constexpr std::uint32_t root() noexcept { return 0; }
  const TreeNode& node(std::uint32_t index) const { return nodes_[index]; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  NodeKey key(std::uint32_t index) const { return nodes_[index].key; }
  /// Node index for `key`, or kNoNode.
  std::uint32_t index_of(NodeKey key) const noexcept;
  NodeKey next_key() const noexcept { return next_key_; }

  std::uint32_t child(std::uint32_t index, Symbol s) const noexcept;
  std::uint32_t terminator_child(std::uint32_t index) const noexcept { return child(index, kTerminator); }
  /// Root, or a node with at least two children. Single-child nodes (only
  /// produced by ensure_leaf_at) are traversed like edge interiors.
  bool is_branch(std::uint32_t index) const noexcept {
    return index == root() || nodes_[index].children.size() >= 2;
  }

  std::uint32_t depth(Point p) const noexcept { return nodes_[p.node].depth - p.remaining; }
  /// Next symbol below a mid-edge point (p.remaining > 0).
  Symbol symbol_at(Point p) const noexcept {
    const auto& e = nodes_[p.node].edge;
    return (*arena_)[e.offset + e.length - p.remaining];
  }
  /// Point after consuming the first symbol of `child`'s edge.
  Point enter(std::uint32_t child) const noexcept { return Point{child, nodes_[child].edge.length - 1}; }

  /// Canonical key of a point: an at_node key when the point is a node, or
  /// when only the terminator follows it (then the key is that leaf's);
  /// otherwise the key of the edge's lower node tagged at_edge.
  std::pair<NodeKey, EntryTag> locus(Point p) const noexcept;

  /// Follows arena[offset, offset + length), which must be spelled by some
  /// path from the root, reading one symbol per edge (skip/count). Calls
  /// on_node(index) for every node reached exactly, root included.
  template <class F>
  Point descend(std::uint32_t offset, std::uint32_t length, F&& on_node) const {
    std::uint32_t cur = root();
    std::uint32_t t = 0;
    on_node(cur);
    while (t < length) {
      std::uint32_t c = child(cur, (*arena_)[offset + t]);
      const std::uint32_t el = nodes_[c].edge.length;
      if (t + el > length) return Point{c, t + el - length};
      t += el;
      cur = c;
      on_node(cur);
    }
    return Point{cur, 0};
  }
  Point descend(std::uint32_t offset, std::uint32_t length) const {
    return descend(offset, length, [](std::uint32_t) {});
  }

  /// Point reached by spelling `s` from the root, or nullopt when the tree
  /// does not spell it. Uses the flat child table once seal() has run.
  std::optional<Point> match(std::span<const Symbol> s) const;
  /// Builds the flat child table behind match(). Any mutation drops it.
  void seal();

  /// Leaf whose labels contain `ref`, or kNoNode.
  std::uint32_t leaf_of(SuffixRef ref) const noexcept;
  /// Labels of every leaf in the subtree below `p`, appended to `out`.
  void collect_labels(Point p, std::vector<SuffixRef>& out) const;
  /// Number of leaves below each node (index-aligned).
  std::vector<std::uint32_t> leaf_counts() const;
  /// Concatenated edge labels from the root to `index`.
  std::vector<Symbol> spell(std::uint32_t index) const;

  /// Ensures a keyed node exists at the end of arena[offset, offset+length)
  /// and that it has a keyed leaf child; returns that leaf's key.
  NodeKey ensure_keyed_point(std::uint32_t offset, std::uint32_t length);

  // Low-level construction hooks used by the builders and the loader.
  std::vector<TreeNode>& mutable_nodes() noexcept {
    unseal();
    return nodes_;
  }
  /// Renumbers nodes into preorder (children by symbol) and sets key = index.
  void renumber_preorder();
  /// Rebuilds key and label lookups; next_key becomes max(key) + 1 unless larger.
  void reindex(NodeKey next_key = 0);

 private:
  std::uint32_t add_node(TreeNode n);
  void replace_child(std::uint32_t parent, std::uint32_t old_child, std::uint32_t new_child);
  void unseal() noexcept { flat_edges_.clear(); }

  // Child list of every node, edges inline; each entry also locates its own
  // child list so a descent never reads nodes_.
  struct FlatEdge {
    std::uint32_t node;
    std::uint32_t offset;
    std::uint32_t length;
    std::uint32_t first;
    std::uint16_t count;
    Symbol symbol;
  };

  std::shared_ptr<const SymbolArena> arena_;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> key_index_;
  std::unordered_map<std::uint64_t, std::uint32_t> leaf_of_;
  NodeKey next_key_ = 0;
  // flat_edges_[0] stands for the root itself.
  std::vector<FlatEdge> flat_edges_;
};

/// Generalized suffix tree over every sequence in `arena`. Identical suffixes
/// of different sequences share one leaf; the empty suffixes share the
/// terminator leaf below the root. Keys are assigned in preorder.
KeyedTree build_gst(std::shared_ptr<const SymbolArena> arena);

/// Trace of walking `s` from the root.
WalkTrace avn(const KeyedTree& tree, std::span<const Symbol> s);
/// Key of the leaf for an indexed suffix, via the leaf map (no walk).
NodeKey avn_last(const KeyedTree& tree, SuffixRef ref);
/// Like avn, but up to `k` mid-edge mismatches are jumped over.
WalkTrace avnj(const KeyedTree& tree, std::span<const Symbol> s, std::uint32_t k);

/// Copy of `tree` with every path cut at symbol depth m; labels below each
/// cut are hoisted into the cut point, which becomes a leaf.
KeyedTree trim_to_depth(const KeyedTree& tree, std::uint32_t m);

/// Keyed leaf for the point `levels_up` symbols above the end of suffix
/// `ref`; nullopt when the suffix is shorter than `levels_up`.
std::optional<NodeKey> ensure_leaf_at(KeyedTree& tree, SuffixRef ref, std::uint32_t levels_up);

}  // namespace errortree
