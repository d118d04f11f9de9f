#include "errortree/arena.hpp"

#include <algorithm>
#include <string>

#include "errortree/errors.hpp"

namespace errortree {

SymbolArena::SymbolArena(const std::vector<std::vector<Symbol>>& sequences) {
  std::size_t total = 0;
  for (const auto& s : sequences) total += s.size() + 1;
  if (total >= 0xFFFFFFF0u) throw ParameterError("input too large for 32-bit offsets");
  data_.reserve(total);
  offsets_.reserve(sequences.size());
  for (const auto& s : sequences) {
    offsets_.push_back(static_cast<std::uint32_t>(data_.size()));
    data_.insert(data_.end(), s.begin(), s.end());
    data_.push_back(kTerminator);
  }
}

std::span<const Symbol> SymbolArena::sequence(std::uint32_t id) const {
  return std::span<const Symbol>(data_).subspan(offsets_.at(id), length(id));
}

std::uint32_t SymbolArena::length(std::uint32_t id) const {
  std::uint32_t end = id + 1 < offsets_.size() ? offsets_[id + 1] : static_cast<std::uint32_t>(data_.size());
  return end - offsets_.at(id) - 1;
}

bool SymbolArena::valid(SuffixRef ref) const noexcept {
  return ref.sequence < offsets_.size() && ref.start >= 1 && ref.start <= length(ref.sequence) + 1;
}

std::uint32_t SymbolArena::offset(SuffixRef ref) const {
  if (!valid(ref))
    throw LookupError("no suffix (" + std::to_string(ref.sequence) + ", " + std::to_string(ref.start) + ")");
  return offsets_[ref.sequence] + ref.start - 1;
}

SuffixRef SymbolArena::locate(std::uint32_t pos) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), pos);
  auto id = static_cast<std::uint32_t>(it - offsets_.begin() - 1);
  return SuffixRef{id, pos - offsets_[id] + 1};
}

}  // namespace errortree
