#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace errortree {

/// Encoded symbol. Alphabet symbols occupy codes [0, sigma).
using Symbol = std::uint8_t;

/// Sequence terminator as stored in tree edges. Never produced by encode().
inline constexpr Symbol kTerminator = 0xFF;
/// Code for a wildcard position in an encoded pattern. Never matches an edge.
inline constexpr Symbol kWildcard = 0xFE;
inline constexpr std::size_t kMaxSigma = 0xFD;

/// Ordered set of byte characters plus a reserved wildcard character.
class Alphabet {
 public:
  Alphabet(std::string name, std::string symbols, char wildcard = '?');

  static Alphabet dna();
  /// Printable ASCII 0x20..0x7E without the wildcard character.
  static Alphabet ascii(char wildcard = '?');
  /// "dna" or "ascii"; throws ParameterError for anything else.
  static Alphabet by_name(std::string_view name);

  const std::string& name() const noexcept { return name_; }
  const std::string& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  char wildcard() const noexcept { return wildcard_; }

  bool contains(char c) const noexcept { return code_[static_cast<unsigned char>(c)] != kAbsent; }
  Symbol code(char c) const noexcept { return code_[static_cast<unsigned char>(c)]; }
  char symbol(Symbol code) const;

  /// Encodes indexed data. Any character outside the alphabet is an InputError.
  std::vector<Symbol> encode(std::string_view s) const;
  /// Encodes a query pattern; `wildcard` (if not '\0') maps to kWildcard.
  /// The wildcard must not be an alphabet symbol.
  std::vector<Symbol> encode_pattern(std::string_view s, char wildcard) const;
  std::string decode(std::span<const Symbol> codes) const;

  bool operator==(const Alphabet& other) const noexcept {
    return symbols_ == other.symbols_ && wildcard_ == other.wildcard_;
  }

 private:
  static constexpr Symbol kAbsent = 0xFF;

  std::string name_;
  std::string symbols_;
  char wildcard_;
  std::array<Symbol, 256> code_{};
};

}  // namespace errortree
