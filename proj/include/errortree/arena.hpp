#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "errortree/alphabet.hpp"

namespace errortree {

/// (sequence id, 1-based start) naming one suffix of one indexed sequence.
/// start == length + 1 names the empty suffix.
struct SuffixRef {
  std::uint32_t sequence = 0;
  std::uint32_t start = 1;

  friend bool operator==(const SuffixRef&, const SuffixRef&) = default;
  friend auto operator<=>(const SuffixRef&, const SuffixRef&) = default;
};

/// Immutable store of encoded sequences. Each sequence is followed by one
/// kTerminator, so the suffix of any sequence plus its terminator is a
/// contiguous range; tree edges are (offset, length) ranges into it.
class SymbolArena {
 public:
  SymbolArena() = default;
  explicit SymbolArena(const std::vector<std::vector<Symbol>>& sequences);

  std::size_t sequence_count() const noexcept { return offsets_.size(); }
  std::span<const Symbol> sequence(std::uint32_t id) const;
  std::uint32_t length(std::uint32_t id) const;
  /// Arena offset of the first symbol of sequence `id`.
  std::uint32_t offset(std::uint32_t id) const { return offsets_.at(id); }
  /// Arena offset of suffix `ref`; checks the reference.
  std::uint32_t offset(SuffixRef ref) const;
  bool valid(SuffixRef ref) const noexcept;
  /// Sequence whose range (terminator included) covers arena position `pos`.
  SuffixRef locate(std::uint32_t pos) const;

  std::span<const Symbol> symbols() const noexcept { return data_; }
  Symbol operator[](std::size_t pos) const noexcept { return data_[pos]; }
  std::size_t size() const noexcept { return data_.size(); }
  /// Total symbol count without terminators.
  std::size_t total_length() const noexcept { return data_.size() - offsets_.size(); }

 private:
  std::vector<Symbol> data_;
  std::vector<std::uint32_t> offsets_;
};

}  // namespace errortree
