#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "errortree/alphabet.hpp"
#include "errortree/error_tree.hpp"

namespace errortree {

/// One sequence per line; blank lines are skipped and a trailing '\r' is
/// dropped. A bad symbol is reported with its 1-based line and offset.
std::vector<std::vector<Symbol>> read_dictionary(std::istream& in, const Alphabet& alphabet);
/// Raw symbols (line breaks ignored) or FASTA: '>' header lines are dropped
/// and the records are concatenated.
std::vector<Symbol> read_text(std::istream& in, const Alphabet& alphabet);

/// Reads `path` in the layout `mode` expects. Text mode yields one sequence.
std::vector<std::vector<Symbol>> read_input(const std::filesystem::path& path, IndexMode mode,
                                            const Alphabet& alphabet);

/// Lines of a pattern file, blank lines skipped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace errortree
