#include "errortree/input.hpp"

#include <fstream>
#include <string>

#include "errortree/errors.hpp"

namespace errortree {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

[[noreturn]] void bad_symbol(const Alphabet& alphabet, std::size_t line, std::size_t offset, char c) {
  throw InputError("line " + std::to_string(line) + ", offset " + std::to_string(offset) + ": symbol '" +
                   std::string(1, c) + "' is not in alphabet " + alphabet.name());
}

void append_line(const Alphabet& alphabet, const std::string& line, std::size_t line_no, std::vector<Symbol>& out) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (!alphabet.contains(line[i])) bad_symbol(alphabet, line_no, i + 1, line[i]);
    out.push_back(alphabet.code(line[i]));
  }
}

}  // namespace

std::vector<std::vector<Symbol>> read_dictionary(std::istream& in, const Alphabet& alphabet) {
  std::vector<std::vector<Symbol>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    out.emplace_back();
    append_line(alphabet, line, line_no, out.back());
  }
  if (out.empty()) throw InputError("dictionary input is empty");
  return out;
}

std::vector<Symbol> read_text(std::istream& in, const Alphabet& alphabet) {
  std::vector<Symbol> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!line.empty() && line.front() == '>') continue;
    append_line(alphabet, line, line_no, out);
  }
  if (out.empty()) throw InputError("text input is empty");
  return out;
}

std::vector<std::vector<Symbol>> read_input(const std::filesystem::path& path, IndexMode mode,
                                            const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input " + path.string());
  if (mode == IndexMode::dictionary) return read_dictionary(in, alphabet);
  return {read_text(in, alphabet)};
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace errortree
