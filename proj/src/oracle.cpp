#include "errortree/oracle.hpp"

#include <algorithm>
#include <limits>

#include "errortree/distance.hpp"

namespace errortree {

std::vector<MatchResult> scan_dict_hamming(const std::vector<std::vector<Symbol>>& dict, std::span<const Symbol> pattern,
                                           std::uint32_t k) {
  std::vector<MatchResult> out;
  for (std::size_t id = 0; id < dict.size(); ++id) {
    auto d = hamming_distance(std::span<const Symbol>(dict[id]), pattern);
    if (d && *d <= k)
      out.push_back(MatchResult{static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(*d), Metric::hamming});
  }
  return out;
}

std::vector<MatchResult> scan_dict_edit(const std::vector<std::vector<Symbol>>& dict, std::span<const Symbol> pattern,
                                        std::uint32_t k) {
  std::vector<MatchResult> out;
  for (std::size_t id = 0; id < dict.size(); ++id) {
    const std::size_t d = edit_distance(std::span<const Symbol>(dict[id]), pattern);
    if (d <= k) out.push_back(MatchResult{static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(d), Metric::edit});
  }
  return out;
}

std::vector<MatchResult> scan_text_hamming(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                           std::uint32_t k) {
  std::vector<MatchResult> out;
  const std::size_t m = pattern.size();
  for (std::size_t p = 0; p + m <= text.size(); ++p) {
    const std::size_t d = *hamming_distance(text.subspan(p, m), pattern);
    if (d <= k) out.push_back(MatchResult{static_cast<std::uint32_t>(p + 1), static_cast<std::uint32_t>(d),
                                          Metric::hamming});
  }
  return out;
}

std::vector<MatchResult> scan_text_edit(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                        std::uint32_t k) {
  // Sellers' DP run right to left: column j of the reversed problem holds, for
  // every start p, the cost of aligning the whole pattern against a window
  // that begins at p and ends anywhere to its right. Window lengths outside
  // [m - k, m + k] cannot reach cost <= k, so the free end covers the band.
  const std::size_t n = text.size();
  const std::size_t m = pattern.size();
  std::vector<MatchResult> out;
  // cost[i] = distance of pattern[i, m) against text[p, e) minimised over e.
  std::vector<std::size_t> col(m + 1), next(m + 1);
  for (std::size_t i = 0; i <= m; ++i) col[i] = m - i;  // p = n: empty window
  std::vector<std::size_t> best(n + 1);
  best[n] = col[0];
  for (std::size_t p = n; p-- > 0;) {
    next[m] = 0;  // the window may end right here
    for (std::size_t i = m; i-- > 0;) {
      const std::size_t diag = col[i + 1] + (text[p] != pattern[i]);
      next[i] = std::min({diag, col[i] + 1, next[i + 1] + 1});
    }
    std::swap(col, next);
    best[p] = col[0];
  }
  for (std::size_t p = 0; p < n; ++p)
    if (best[p] <= k)
      out.push_back(MatchResult{static_cast<std::uint32_t>(p + 1), static_cast<std::uint32_t>(best[p]), Metric::edit});
  return out;
}

namespace {

std::optional<std::uint32_t> wildcard_distance(std::span<const Symbol> pattern, std::span<const Symbol> window,
                                               std::uint32_t extra) {
  if (pattern.size() != window.size()) return std::nullopt;
  const std::size_t d = wildcard_mismatches(pattern, window, kWildcard);
  if (d > extra) return std::nullopt;
  return static_cast<std::uint32_t>(d);
}

}  // namespace

std::vector<MatchResult> scan_dict_wildcard(const std::vector<std::vector<Symbol>>& dict,
                                            std::span<const Symbol> pattern, std::uint32_t extra) {
  std::vector<MatchResult> out;
  for (std::size_t id = 0; id < dict.size(); ++id)
    if (auto d = wildcard_distance(pattern, dict[id], extra))
      out.push_back(MatchResult{static_cast<std::uint32_t>(id), *d, Metric::wildcard});
  return out;
}

std::vector<MatchResult> scan_text_wildcard(std::span<const Symbol> text, std::span<const Symbol> pattern,
                                            std::uint32_t extra) {
  std::vector<MatchResult> out;
  const std::size_t m = pattern.size();
  for (std::size_t p = 0; p + m <= text.size(); ++p)
    if (auto d = wildcard_distance(pattern, text.subspan(p, m), extra))
      out.push_back(MatchResult{static_cast<std::uint32_t>(p + 1), *d, Metric::wildcard});
  return out;
}

std::vector<MatchResult> scan(IndexMode mode, Metric metric, const std::vector<std::vector<Symbol>>& data,
                              std::span<const Symbol> pattern, std::uint32_t k, const QueryOptions& options) {
  std::uint32_t extra = 0;
  if (metric == Metric::wildcard && options.all_errors) {
    const auto w = static_cast<std::uint32_t>(std::count(pattern.begin(), pattern.end(), kWildcard));
    extra = k >= w ? k - w : 0;
  }
  if (mode == IndexMode::dictionary) {
    switch (metric) {
      case Metric::hamming: return scan_dict_hamming(data, pattern, k);
      case Metric::edit: return scan_dict_edit(data, pattern, k);
      case Metric::wildcard: return scan_dict_wildcard(data, pattern, extra);
    }
  }
  std::span<const Symbol> text = data.empty() ? std::span<const Symbol>() : std::span<const Symbol>(data.front());
  switch (metric) {
    case Metric::hamming: return scan_text_hamming(text, pattern, k);
    case Metric::edit: return scan_text_edit(text, pattern, k);
    case Metric::wildcard: return scan_text_wildcard(text, pattern, extra);
  }
  return {};
}

}  // namespace errortree
