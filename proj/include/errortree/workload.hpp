#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errortree/error_tree.hpp"
#include "errortree/query.hpp"

namespace errortree {

/// Seeded generator. Only raw 64-bit draws are used so streams are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, n); n must be > 0.
  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(gen_() % n); }
  /// Uniform in [lo, hi].
  std::uint32_t between(std::uint32_t lo, std::uint32_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

std::vector<Symbol> random_sequence(Rng& rng, std::size_t length, std::uint32_t sigma);
std::vector<std::vector<Symbol>> random_dictionary(Rng& rng, std::size_t count, std::size_t min_len,
                                                   std::size_t max_len, std::uint32_t sigma);

/// Edit counts to plant into one pattern.
struct Planting {
  std::uint32_t substitutions = 0;
  std::uint32_t deletions = 0;   // symbols removed from the source
  std::uint32_t insertions = 0;  // symbols added to the source
  std::uint32_t total() const noexcept { return substitutions + deletions + insertions; }
};

/// Applies the planting at random positions. Substitutions always change the
/// symbol and hit distinct source positions, so the distance to the source is
/// at most planting.total().
std::vector<Symbol> plant_errors(Rng& rng, std::span<const Symbol> source, const Planting& planting,
                                 std::uint32_t sigma);
/// Replaces `count` distinct positions with kWildcard.
void add_wildcards(Rng& rng, std::vector<Symbol>& pattern, std::uint32_t count);

/// The sequences an index was built over (text mode: one text).
std::vector<std::vector<Symbol>> index_data(const ErrorTree& index);

/// Query patterns for `metric` with budget k: even draws are planted-error
/// patterns taken from the indexed data, odd draws are uniform random. Text
/// patterns always have length index.m.
std::vector<std::vector<Symbol>> sample_patterns(Rng& rng, const ErrorTree& index, Metric metric, std::uint32_t k,
                                                 std::size_t count);

struct BenchRow {
  std::string target;
  Metric metric = Metric::hamming;
  std::uint32_t k = 0;
  std::size_t queries = 0;
  double median_us = 0;
  double p95_us = 0;
  double oracle_median_us = 0;
  std::size_t results = 0;
};

/// Times every pattern against the index, and against the brute-force scan
/// when `with_oracle` is set.
BenchRow run_bench(const ErrorTree& index, Metric metric, std::uint32_t k,
                   const std::vector<std::vector<Symbol>>& patterns, const std::string& target, bool with_oracle);
std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

/// Median and 95th percentile of `samples` (nearest rank). Zero when empty.
double percentile(std::vector<double> samples, double q);

}  // namespace errortree
