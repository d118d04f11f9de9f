#pragma once

// Exact distance primitives. Everything here is header-only and works on any
// equality-comparable element type, so the same code checks raw strings in
// tests and encoded symbol buffers inside the index.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "errortree/errors.hpp"

namespace errortree {

/// Number of differing positions, or nullopt when the lengths differ.
template <class T>
std::optional<std::size_t> hamming_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) return std::nullopt;
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

inline std::optional<std::size_t> hamming_distance(std::string_view a, std::string_view b) {
  return hamming_distance(std::span<const char>(a), std::span<const char>(b));
}

/// Unit-cost Levenshtein distance, two-row DP.
template <class T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(std::span<const char>(a), std::span<const char>(b));
}

namespace detail {

// Banded DP of `pattern` against prefixes of `data`. Row i holds distances of
// pattern[0, i) against data[0, j) for |i - j| <= k; cells outside the band
// are treated as infinite. Returns the final row (indexed by j) restricted to
// the band, with kInf elsewhere.
template <class T>
std::vector<std::size_t> banded_last_row(std::span<const T> data, std::span<const T> pattern, std::size_t k) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  const std::size_t n = data.size();
  const std::size_t m = pattern.size();
  std::vector<std::size_t> prev(n + 1, kInf), cur(n + 1, kInf);
  for (std::size_t j = 0; j <= std::min(n, k); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(n, i + k);
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == 0) {
        cur[0] = i;
        continue;
      }
      cur[j] = std::min({prev[j - 1] + (data[j - 1] != pattern[i - 1]), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev;
}

}  // namespace detail

/// Edit distance if it is <= k, nullopt otherwise. O((|a|+|b|) k).
template <class T>
std::optional<std::size_t> bounded_edit_distance(std::span<const T> a, std::span<const T> b, std::size_t k) {
  const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (diff > k) return std::nullopt;
  auto row = detail::banded_last_row(a, b, k);
  std::size_t d = row[a.size()];
  if (d > k) return std::nullopt;
  return d;
}

/// Smallest edit distance between `pattern` and any prefix of `data`
/// (window lengths within [|pattern| - k, |pattern| + k]), if it is <= k.
template <class T>
std::optional<std::size_t> best_prefix_edit_distance(std::span<const T> data, std::span<const T> pattern,
                                                     std::size_t k) {
  auto window = data.subspan(0, std::min(data.size(), pattern.size() + k));
  auto row = detail::banded_last_row(window, pattern, k);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t d : row) best = std::min(best, d);
  if (best > k) return std::nullopt;
  return best;
}

/// Count of positions where a non-wildcard pattern symbol differs from the window.
template <class T>
std::size_t wildcard_mismatches(std::span<const T> pattern, std::span<const T> window, T wildcard) {
  if (pattern.size() != window.size()) throw ParameterError("wildcard_mismatch: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) d += (pattern[i] != wildcard && pattern[i] != window[i]);
  return d;
}

/// True iff every non-wildcard position of `pattern` equals `window`.
template <class T>
bool wildcard_mismatch(std::span<const T> pattern, std::span<const T> window, T wildcard) {
  return wildcard_mismatches(pattern, window, wildcard) == 0;
}

inline bool wildcard_mismatch(std::string_view pattern, std::string_view window, char wildcard = '?') {
  return wildcard_mismatch(std::span<const char>(pattern), std::span<const char>(window), wildcard);
}

}  // namespace errortree
