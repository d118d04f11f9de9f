#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "errortree/alphabet.hpp"
#include "errortree/arena.hpp"
#include "errortree/keyed_tree.hpp"

namespace errortree {

enum class IndexMode : std::uint8_t { dictionary = 0, text = 1 };

/// Placement or operation carried by one part of an error key. The final part
/// of every key is a placement (where the last error-free segment ended in the
/// suffix tree); earlier parts record a node where an error forced a restart.
enum class PartTag : std::uint8_t { at_node = 0, at_edge = 1, sub = 2, del = 3, ins = 4 };

using KeyPart = std::uint64_t;

constexpr KeyPart make_part(NodeKey key, PartTag tag) noexcept {
  return (KeyPart{key} << 3) | static_cast<KeyPart>(tag);
}
constexpr NodeKey part_key(KeyPart p) noexcept { return static_cast<NodeKey>(p >> 3); }
constexpr PartTag part_tag(KeyPart p) noexcept { return static_cast<PartTag>(p & 7u); }

/// sub: substitutions only. ins: every restart is a shift (deletion or
/// insertion). edit: mixed operations.
enum class TableKind : std::uint8_t { sub = 0, ins = 1, edit = 2 };
inline constexpr std::size_t kTableKinds = 3;

TableKind kind_of(std::span<const KeyPart> parts) noexcept;
const char* kind_name(TableKind kind) noexcept;

/// All entries of one (kind, level) pair across every trie node, frozen into
/// sorted flat arrays. A row is (owner node, `level` key parts, leaf node);
/// rows sharing owner and key are contiguous, so a lookup is one binary search.
class ErrorTable {
 public:
  ErrorTable() = default;
  explicit ErrorTable(std::uint32_t level) : level_(level) {}

  std::uint32_t level() const noexcept { return level_; }
  std::size_t size() const noexcept { return leaves_.size(); }
  bool empty() const noexcept { return leaves_.empty(); }

  void add(std::uint32_t owner, std::span<const KeyPart> key, std::uint32_t leaf);
  /// Sorts rows and drops duplicates. Lookups are only valid after freezing.
  void freeze();
  void clear();

  /// Leaves stored under (owner, key); empty when absent.
  std::span<const std::uint32_t> lookup(std::uint32_t owner, std::span<const KeyPart> key) const;
  /// True when `owner` has at least one row.
  bool has_owner(std::uint32_t owner) const;

  std::uint32_t owner(std::size_t row) const { return owners_[row]; }
  std::span<const KeyPart> key(std::size_t row) const {
    return std::span<const KeyPart>(parts_).subspan(row * level_, level_);
  }
  std::uint32_t leaf(std::size_t row) const { return leaves_[row]; }
  std::size_t bytes() const noexcept {
    return (owners_.size() + leaves_.size() + owner_start_.size()) * sizeof(std::uint32_t) +
           parts_.size() * sizeof(KeyPart);
  }

  friend bool operator==(const ErrorTable&, const ErrorTable&) = default;

 private:
  int compare_row(std::size_t row, std::uint32_t owner, std::span<const KeyPart> key) const;

  std::uint32_t level_ = 1;
  std::vector<std::uint32_t> owners_;
  std::vector<KeyPart> parts_;
  std::vector<std::uint32_t> leaves_;
  /// Rows of owner o are [owner_start_[o], owner_start_[o + 1]).
  std::vector<std::uint32_t> owner_start_;
};

struct BuildOptions {
  IndexMode mode = IndexMode::dictionary;
  /// Largest error budget queries may use.
  std::uint32_t k = 1;
  /// Build shift/mixed tables so edit-distance queries are supported.
  bool indels = false;
  /// Pattern length (text mode only).
  std::uint32_t m = 0;
};

struct TableStats {
  std::size_t kst_nodes = 0;
  std::size_t trie_nodes = 0;
  std::size_t trie_leaves = 0;
  std::size_t sequences = 0;
  std::size_t total_length = 0;
  /// entries[kind][level - 1]
  std::array<std::vector<std::size_t>, kTableKinds> entries;
  std::size_t total_entries = 0;
  std::size_t table_bytes = 0;
  std::size_t tree_bytes = 0;

  friend bool operator==(const TableStats&, const TableStats&) = default;
};

/// Compact trie (dictionary) or trimmed suffix tree (text) plus per-node error
/// tables, and the companion keyed suffix tree the keys refer to.
struct ErrorTree {
  IndexMode mode = IndexMode::dictionary;
  Alphabet alphabet = Alphabet::dna();
  std::uint32_t k = 0;
  bool indels = false;
  /// Pattern length for text mode; 0 in dictionary mode.
  std::uint32_t m = 0;

  std::shared_ptr<const SymbolArena> arena;
  KeyedTree kst;
  KeyedTree trie;
  /// Node index of the child with the most leaves below, per trie node (kNoNode for leaves).
  std::vector<std::uint32_t> heavy;
  /// Dictionary mode, per trie node: bit min(len, 63) set for each sequence
  /// length below the node. Empty in text mode.
  std::vector<std::uint64_t> lengths_below;
  /// As lengths_below, but only over the non-heavy children, whose leaves
  /// are the ones the node's tables hold.
  std::vector<std::uint64_t> light_lengths;
  /// tables[kind][level - 1]
  std::array<std::vector<ErrorTable>, kTableKinds> tables;
  /// Set once shift markers have been placed in the suffix tree.
  bool markers_placed = false;

  /// Symbol depth to which the trie is kept in text mode.
  std::uint32_t trie_depth() const noexcept { return m + (indels ? k : 0); }
  const ErrorTable* table(TableKind kind, std::uint32_t level) const noexcept;
};

/// Compacted trie over every sequence of `arena` (terminators included).
/// Duplicate sequences share one leaf labelled (id, 1) for each copy.
KeyedTree build_compact_trie(std::shared_ptr<const SymbolArena> arena);

/// Heavy child per node: most leaves below, ties to the smallest symbol.
std::vector<std::uint32_t> heavy_children(const KeyedTree& trie);
/// Fills lengths_below and light_lengths (dictionary mode; clears them otherwise).
void index_lengths(ErrorTree& et);
/// Bit used for sequence length `len` in the length masks.
constexpr std::uint64_t length_bit(std::uint64_t len) noexcept { return std::uint64_t{1} << (len < 63 ? len : 63); }

/// Level-1 substitution tables.
void build_level_1(ErrorTree& et);
/// Substitution tables of level j (2 <= j <= et.k).
void build_level_k(ErrorTree& et, std::uint32_t level);
/// Places shift markers, then builds shift and mixed tables for levels 1..k.
void build_indel_tables(ErrorTree& et, std::uint32_t k);

/// Dictionary index over `sequences` (already encoded with `alphabet`).
ErrorTree build_dictionary(const Alphabet& alphabet, const std::vector<std::vector<Symbol>>& sequences,
                           const BuildOptions& options);
/// Text index for patterns of length options.m.
ErrorTree build_text(const Alphabet& alphabet, const std::vector<Symbol>& text, const BuildOptions& options);
/// Dispatches on options.mode; text mode takes sequences[0].
ErrorTree build_index(const Alphabet& alphabet, const std::vector<std::vector<Symbol>>& sequences,
                      const BuildOptions& options);

/// Finishes an index whose trees were filled in directly (loader).
void finalize_loaded(ErrorTree& et);

TableStats stats(const ErrorTree& et);
std::size_t table_entries(const ErrorTree& et, TableKind kind, std::uint32_t level);

/// Data-side keys: every error key produced by the segment arena[offset,
/// offset + length) with at most `budget` node-aligned operations. Exposed for
/// tests.
std::vector<std::vector<KeyPart>> segment_keys(const KeyedTree& kst, std::uint32_t offset, std::uint32_t length,
                                               std::uint32_t budget, bool indels);

}  // namespace errortree
