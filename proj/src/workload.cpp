#include "errortree/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "errortree/oracle.hpp"

namespace errortree {

std::vector<Symbol> random_sequence(Rng& rng, std::size_t length, std::uint32_t sigma) {
  std::vector<Symbol> s(length);
  for (auto& c : s) c = static_cast<Symbol>(rng.below(sigma));
  return s;
}

std::vector<std::vector<Symbol>> random_dictionary(Rng& rng, std::size_t count, std::size_t min_len,
                                                   std::size_t max_len, std::uint32_t sigma) {
  std::vector<std::vector<Symbol>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len =
        rng.between(static_cast<std::uint32_t>(min_len), static_cast<std::uint32_t>(max_len));
    out.push_back(random_sequence(rng, len, sigma));
  }
  return out;
}

std::vector<Symbol> plant_errors(Rng& rng, std::span<const Symbol> source, const Planting& planting,
                                 std::uint32_t sigma) {
  std::vector<Symbol> s(source.begin(), source.end());
  std::vector<bool> touched(s.size(), false);
  for (std::uint32_t i = 0; i < planting.substitutions && sigma > 1; ++i) {
    std::vector<std::uint32_t> free;
    for (std::uint32_t p = 0; p < s.size(); ++p)
      if (!touched[p]) free.push_back(p);
    if (free.empty()) break;
    const std::uint32_t p = free[rng.below(static_cast<std::uint32_t>(free.size()))];
    touched[p] = true;
    s[p] = static_cast<Symbol>((s[p] + 1 + rng.below(sigma - 1)) % sigma);
  }
  for (std::uint32_t i = 0; i < planting.deletions && !s.empty(); ++i)
    s.erase(s.begin() + rng.below(static_cast<std::uint32_t>(s.size())));
  for (std::uint32_t i = 0; i < planting.insertions; ++i)
    s.insert(s.begin() + rng.below(static_cast<std::uint32_t>(s.size() + 1)), static_cast<Symbol>(rng.below(sigma)));
  return s;
}

void add_wildcards(Rng& rng, std::vector<Symbol>& pattern, std::uint32_t count) {
  std::vector<std::uint32_t> pos(pattern.size());
  for (std::uint32_t i = 0; i < pos.size(); ++i) pos[i] = i;
  for (std::uint32_t i = 0; i < count && i < pos.size(); ++i) {
    std::swap(pos[i], pos[i + rng.below(static_cast<std::uint32_t>(pos.size() - i))]);
    pattern[pos[i]] = kWildcard;
  }
}

std::vector<std::vector<Symbol>> index_data(const ErrorTree& index) {
  std::vector<std::vector<Symbol>> out;
  for (std::uint32_t id = 0; id < index.arena->sequence_count(); ++id) {
    auto s = index.arena->sequence(id);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

std::vector<std::vector<Symbol>> sample_patterns(Rng& rng, const ErrorTree& index, Metric metric, std::uint32_t k,
                                                 std::size_t count) {
  const auto sigma = static_cast<std::uint32_t>(index.alphabet.size());
  const SymbolArena& a = *index.arena;
  std::vector<std::vector<Symbol>> out;
  out.reserve(count);
  for (std::size_t q = 0; q < count; ++q) {
    const std::uint32_t errors = rng.below(k + 1);
    Planting plant;
    if (metric == Metric::edit) {
      plant.insertions = rng.below(errors + 1);
      plant.deletions = rng.below(errors - plant.insertions + 1);
    }
    plant.substitutions = metric == Metric::wildcard ? 0 : errors - plant.insertions - plant.deletions;
    std::vector<Symbol> p;
    if (index.mode == IndexMode::text) {
      const std::uint32_t n = a.length(0);
      // Window length chosen so the planted pattern has length m.
      const std::uint32_t want = index.m + plant.deletions - std::min(plant.insertions, index.m + plant.deletions);
      if (q % 2 == 0 && n >= want) {
        const std::uint32_t start = rng.below(n - want + 1);
        p = plant_errors(rng, a.sequence(0).subspan(start, want), plant, sigma);
      }
      if (p.size() != index.m) p = random_sequence(rng, index.m, sigma);
    } else {
      const std::uint32_t id = rng.below(static_cast<std::uint32_t>(a.sequence_count()));
      if (q % 2 == 0)
        p = plant_errors(rng, a.sequence(id), plant, sigma);
      else
        p = random_sequence(rng, a.length(id), sigma);
      if (p.empty()) p = random_sequence(rng, 1, sigma);
    }
    if (metric == Metric::wildcard) add_wildcards(rng, p, errors);
    out.push_back(std::move(p));
  }
  return out;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

BenchRow run_bench(const ErrorTree& index, Metric metric, std::uint32_t k,
                   const std::vector<std::vector<Symbol>>& patterns, const std::string& target, bool with_oracle) {
  using clock = std::chrono::steady_clock;
  BenchRow row;
  row.target = target;
  row.metric = metric;
  row.k = k;
  row.queries = patterns.size();
  const auto data = with_oracle ? index_data(index) : std::vector<std::vector<Symbol>>{};
  // Rounds alternate an index batch and a scan batch; each pattern keeps its
  // fastest time on both sides, so machine noise hits both the same way.
  constexpr int kRounds = 3;
  std::vector<double> times(patterns.size(), 1e300), oracle_times(with_oracle ? patterns.size() : 0, 1e300);
  for (int round = 0; round < kRounds; ++round) {
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const auto t0 = clock::now();
      const auto r = query(index, metric, patterns[i], k);
      times[i] = std::min(times[i], std::chrono::duration<double, std::micro>(clock::now() - t0).count());
      if (round == 0) row.results += r.size();
    }
    if (!with_oracle) continue;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const auto t1 = clock::now();
      const auto o = scan(index.mode, metric, data, patterns[i], k);
      oracle_times[i] = std::min(oracle_times[i], std::chrono::duration<double, std::micro>(clock::now() - t1).count());
    }
  }
  row.median_us = percentile(times, 0.5);
  row.p95_us = percentile(times, 0.95);
  row.oracle_median_us = percentile(oracle_times, 0.5);
  return row;
}

std::string bench_csv_header() { return "target,metric,k,queries,median_us,p95_us,oracle_median_us,results"; }

std::string bench_csv_row(const BenchRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%u,%zu,%.3f,%.3f,%.3f,%zu", row.target.c_str(), metric_name(row.metric),
                row.k, row.queries, row.median_us, row.p95_us, row.oracle_median_us, row.results);
  return buf;
}

}  // namespace errortree
