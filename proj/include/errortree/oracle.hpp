#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "errortree/alphabet.hpp"
#include "errortree/query.hpp"

namespace errortree {

// Brute-force reference scans. They never touch an index; k is only a
// threshold. Results are sorted by subject.

/// Every string of length |P| within Hamming distance k.
std::vector<MatchResult> scan_dict_hamming(const std::vector<std::vector<Symbol>>& dict, std::span<const Symbol> pattern,
                                           std::uint32_t k);
/// Every string within edit distance k (full DP per string).
std::vector<MatchResult> scan_dict_edit(const std::vector<std::vector<Symbol>>& dict, std::span<const Symbol> pattern,
                                        std::uint32_t k);
/// 1-based start positions whose length-|P| window is within Hamming distance k.
std::vector<MatchResult> scan_text_hamming(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                           std::uint32_t k);
/// 1-based start positions p such that some window text[p, p + L) with
/// L in [|P| - k, |P| + k] is within edit distance k.
std::vector<MatchResult> scan_text_edit(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                        std::uint32_t k);
/// Wildcard scans: pattern positions holding kWildcard match anything. The
/// other positions may differ in at most `extra` places (0 by default).
std::vector<MatchResult> scan_dict_wildcard(const std::vector<std::vector<Symbol>>& dict,
                                            std::span<const Symbol> pattern, std::uint32_t extra = 0);
std::vector<MatchResult> scan_text_wildcard(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                            std::uint32_t extra = 0);

/// Oracle for any metric over the data an index was built from.
std::vector<MatchResult> scan(IndexMode mode, Metric metric, const std::vector<std::vector<Symbol>>& data,
                              std::span<const Symbol> pattern, std::uint32_t k, const QueryOptions& options = {});

}  // namespace errortree
