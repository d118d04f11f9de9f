#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errortree/error_tree.hpp"

namespace errortree {

enum class Metric : std::uint8_t { hamming = 0, edit = 1, wildcard = 2 };

const char* metric_name(Metric metric) noexcept;
/// "hamming", "edit" or "wildcard"; ParameterError otherwise.
Metric parse_metric(std::string_view name);

struct MatchResult {
  /// Subject id (dictionary, 0-based) or 1-based text start position.
  std::uint32_t subject = 0;
  std::uint32_t distance = 0;
  Metric kind = Metric::hamming;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct QueryOptions {
  /// Wildcard queries: also allow up to k - w substitutions at other positions.
  bool all_errors = false;
};

/// Lazily computed avnj traces of every pattern suffix over the suffix tree.
class PatternWalkSet {
 public:
  PatternWalkSet(const KeyedTree& kst, std::span<const Symbol> pattern, std::uint32_t k);

  std::size_t size() const noexcept { return pattern_.size(); }
  /// Trace of the 0-based suffix `start` (computed on first use).
  const WalkTrace& trace(std::size_t start) const;
  std::span<const Symbol> pattern() const noexcept { return pattern_; }
  std::uint32_t k() const noexcept { return k_; }

 private:
  const KeyedTree* kst_;
  std::vector<Symbol> pattern_;
  std::uint32_t k_;
  mutable std::vector<std::optional<WalkTrace>> traces_;
};

/// Encodes `pattern` and computes every suffix trace up front.
PatternWalkSet prepare_pattern(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k);

std::vector<MatchResult> query_hamming(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k);
std::vector<MatchResult> query_edit(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k);
/// Wildcard positions hold kWildcard.
std::vector<MatchResult> query_wildcard(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k,
                                        const QueryOptions& options = {});

/// Text-mode entry points; they reject dictionary indexes with ModeError.
std::vector<MatchResult> query_text_hamming(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k);
std::vector<MatchResult> query_text_edit(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k);
std::vector<MatchResult> query_text_wildcard(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k,
                                             const QueryOptions& options = {});

std::vector<MatchResult> query(const ErrorTree& index, Metric metric, std::span<const Symbol> pattern, std::uint32_t k,
                               const QueryOptions& options = {});
/// Encodes a raw pattern with the index alphabet (wildcard metric maps the
/// alphabet's wildcard character) and runs query().
std::vector<MatchResult> query_string(const ErrorTree& index, Metric metric, std::string_view pattern, std::uint32_t k,
                                      const QueryOptions& options = {});

/// Pattern-side keys for the 0-based suffix `start` with `budget` errors,
/// as used by table probes. Exposed for tests.
std::vector<std::vector<KeyPart>> pattern_keys(const ErrorTree& index, std::span<const Symbol> pattern,
                                               std::uint32_t start, std::uint32_t budget, Metric metric);

}  // namespace errortree
