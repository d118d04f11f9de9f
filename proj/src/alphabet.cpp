#include "errortree/alphabet.hpp"

#include <algorithm>

#include "errortree/errors.hpp"

namespace errortree {

Alphabet::Alphabet(std::string name, std::string symbols, char wildcard)
    : name_(std::move(name)), symbols_(std::move(symbols)), wildcard_(wildcard) {
  code_.fill(kAbsent);
  if (symbols_.size() < 2) throw ParameterError("alphabet needs at least two symbols");
  if (symbols_.size() > kMaxSigma) throw ParameterError("alphabet too large");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto c = static_cast<unsigned char>(symbols_[i]);
    if (code_[c] != kAbsent) throw ParameterError("duplicate alphabet symbol '" + std::string(1, symbols_[i]) + "'");
    code_[c] = static_cast<Symbol>(i);
  }
  if (contains(wildcard_)) throw ParameterError("wildcard character is an alphabet symbol");
}

Alphabet Alphabet::dna() { return Alphabet("dna", "ACGT"); }

Alphabet Alphabet::ascii(char wildcard) {
  std::string s;
  for (int c = 0x20; c <= 0x7E; ++c)
    if (c != wildcard) s.push_back(static_cast<char>(c));
  return Alphabet("ascii", s, wildcard);
}

Alphabet Alphabet::by_name(std::string_view name) {
  if (name == "dna") return dna();
  if (name == "ascii") return ascii();
  throw ParameterError("unknown alphabet '" + std::string(name) + "' (expected dna or ascii)");
}

char Alphabet::symbol(Symbol code) const {
  if (code == kWildcard) return wildcard_;
  if (code == kTerminator) return '$';
  if (code >= symbols_.size()) throw InputError("symbol code out of range");
  return symbols_[code];
}

std::vector<Symbol> Alphabet::encode(std::string_view s) const {
  std::vector<Symbol> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!contains(s[i]))
      throw InputError("symbol '" + std::string(1, s[i]) + "' at offset " + std::to_string(i + 1) +
                       " is not in alphabet " + name_);
    out.push_back(code(s[i]));
  }
  return out;
}

std::vector<Symbol> Alphabet::encode_pattern(std::string_view s, char wildcard) const {
  if (wildcard != '\0' && contains(wildcard)) throw ParameterError("wildcard character is an alphabet symbol");
  std::vector<Symbol> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (wildcard != '\0' && s[i] == wildcard) {
      out.push_back(kWildcard);
    } else if (contains(s[i])) {
      out.push_back(code(s[i]));
    } else {
      throw InputError("pattern symbol '" + std::string(1, s[i]) + "' at offset " + std::to_string(i + 1) +
                       " is not in alphabet " + name_);
    }
  }
  return out;
}

std::string Alphabet::decode(std::span<const Symbol> codes) const {
  std::string out;
  out.reserve(codes.size());
  for (Symbol c : codes) out.push_back(symbol(c));
  return out;
}

}  // namespace errortree
