// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Optional arguments select criteria by
// id ("1 5 perf").

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errortree/distance.hpp"
#include "errortree/error_tree.hpp"
#include "errortree/errors.hpp"
#include "errortree/oracle.hpp"
#include "errortree/persistence.hpp"
#include "errortree/query.hpp"
#include "errortree/workload.hpp"

using namespace errortree;

namespace {

using clock_type = std::chrono::steady_clock;

const Alphabet kDna = Alphabet::dna();

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

std::string render(std::span<const Symbol> p) {
  std::string s;
  for (Symbol c : p) s += c == kWildcard ? '?' : kDna.symbol(c);
  return s;
}

std::string render(const std::vector<MatchResult>& rs) {
  std::ostringstream o;
  o << '{';
  for (std::size_t i = 0; i < rs.size() && i < 8; ++i) o << (i ? "," : "") << rs[i].subject << ':' << rs[i].distance;
  if (rs.size() > 8) o << ",...(" << rs.size() << ")";
  o << '}';
  return o.str();
}

// Tallies index-vs-oracle comparisons and keeps the first divergence.
struct Tally {
  std::size_t queries = 0;
  std::size_t divergences = 0;
  std::string first;

  void compare(const ErrorTree& et, Metric metric, std::span<const Symbol> p, std::uint32_t k,
               const std::vector<std::vector<Symbol>>& data, const QueryOptions& opt = {}) {
    ++queries;
    const auto got = query(et, metric, p, k, opt);
    const auto want = scan(et.mode, metric, data, p, k, opt);
    if (got == want) return;
    if (divergences++ == 0)
      first = std::string(metric_name(metric)) + " k=" + std::to_string(k) + " P=" + render(p) + " index=" +
              render(got) + " oracle=" + render(want);
  }

  Outcome outcome(const std::string& extra = {}) const {
    Outcome o;
    o.pass = divergences == 0 && queries > 0;
    o.detail = std::to_string(queries) + " queries, " + std::to_string(divergences) + " divergences";
    if (!extra.empty()) o.detail += ", " + extra;
    if (!first.empty()) o.detail += "; first: " + first;
    return o;
  }
};

// Leaf-count and spelling checks on a built suffix tree; spelling is sampled.
struct StructureCheck {
  std::size_t trees = 0;
  std::size_t failures = 0;
  std::string first;

  void check(const KeyedTree& t, Rng& rng) {
    ++trees;
    const auto& arena = t.arena();
    std::size_t labels = 0;
    std::vector<std::uint32_t> leaves;
    for (std::uint32_t i = 0; i < t.size(); ++i) {
      const auto& n = t.node(i);
      for (const auto& l : n.labels)
        if (l.start <= arena.length(l.sequence)) ++labels;
      if (!n.labels.empty()) leaves.push_back(i);
    }
    if (labels != arena.total_length()) fail("leaf labels " + std::to_string(labels) + " != total length");
    for (int s = 0; s < 100 && !leaves.empty(); ++s) {
      const auto leaf = leaves[rng.below(static_cast<std::uint32_t>(leaves.size()))];
      const auto& l = t.node(leaf).labels.front();
      auto seq = arena.sequence(l.sequence);
      std::vector<Symbol> want(seq.begin() + (l.start - 1), seq.end());
      want.push_back(kTerminator);
      if (t.spell(leaf) != want) fail("leaf " + std::to_string(leaf) + " misspells its suffix");
    }
  }

  void fail(const std::string& why) {
    if (failures++ == 0) first = why;
  }
};

StructureCheck g_structure;
Rng g_structure_rng(606);

std::vector<std::vector<Symbol>> dictionary_fixture(Rng& rng) {
  return random_dictionary(rng, rng.between(1, 200), 8, 32, 4);
}

ErrorTree build(const std::vector<std::vector<Symbol>>& data, IndexMode mode, std::uint32_t k, bool indels,
                std::uint32_t m = 0) {
  BuildOptions o;
  o.mode = mode;
  o.k = k;
  o.indels = indels;
  o.m = m;
  ErrorTree et = build_index(kDna, data, o);
  g_structure.check(et.kst, g_structure_rng);
  return et;
}

// Texts for the text-mode criteria: sizes spread over [1000, 50000] with the
// largest size always present.
std::vector<Symbol> text_fixture(Rng& rng, std::size_t i) {
  const std::uint32_t n = i % 10 == 0 ? 50000 : rng.between(1000, 50000);
  return random_sequence(rng, n, 4);
}

Outcome dictionary_hamming() {
  Rng rng(101);
  Tally tally;
  for (int d = 0; d < 200; ++d) {
    const auto dict = dictionary_fixture(rng);
    const ErrorTree et = build(dict, IndexMode::dictionary, 3, false);
    for (std::uint32_t k = 0; k <= 3; ++k)
      for (const auto& p : sample_patterns(rng, et, Metric::hamming, k, 5))
        for (std::uint32_t kq = 0; kq <= 3; ++kq) tally.compare(et, Metric::hamming, p, kq, dict);
  }
  return tally.outcome("200 dictionaries, k in {0,1,2,3}");
}

Outcome dictionary_edit() {
  Rng rng(102);
  Tally tally;
  for (int d = 0; d < 200; ++d) {
    const auto dict = dictionary_fixture(rng);
    const ErrorTree et = build(dict, IndexMode::dictionary, 2, true);
    for (std::uint32_t k = 1; k <= 2; ++k)
      for (const auto& p : sample_patterns(rng, et, Metric::edit, k, 10))
        for (std::uint32_t kq = 1; kq <= 2; ++kq) tally.compare(et, Metric::edit, p, kq, dict);
  }
  return tally.outcome("200 dictionaries, k in {1,2}");
}

Outcome text_mode() {
  Rng rng(103);
  Tally hamming, edit;
  const std::uint32_t ms[] = {8, 16, 32};
  for (std::size_t t = 0; t < 50; ++t) {
    const std::vector<std::vector<Symbol>> data = {text_fixture(rng, t)};
    const std::uint32_t m = ms[t % 3];
    const ErrorTree h = build(data, IndexMode::text, 2, false, m);
    const ErrorTree e = build(data, IndexMode::text, 2, true, m);
    for (std::uint32_t k = 0; k <= 2; ++k) {
      for (const auto& p : sample_patterns(rng, h, Metric::hamming, k, 6)) hamming.compare(h, Metric::hamming, p, k, data);
      for (const auto& p : sample_patterns(rng, e, Metric::edit, k, 6)) edit.compare(e, Metric::edit, p, k, data);
    }
  }
  Outcome o;
  const Outcome oh = hamming.outcome(), oe = edit.outcome();
  o.pass = oh.pass && oe.pass;
  o.detail = "50 texts, m in {8,16,32}; hamming: " + oh.detail + "; edit: " + oe.detail;
  return o;
}

Outcome wildcard() {
  Rng rng(104);
  Tally tally;
  for (int d = 0; d < 60; ++d) {
    const auto dict = dictionary_fixture(rng);
    const ErrorTree et = build(dict, IndexMode::dictionary, 3, false);
    for (std::uint32_t w = 0; w <= 3; ++w)
      for (const auto& p : sample_patterns(rng, et, Metric::wildcard, w, 5)) {
        tally.compare(et, Metric::wildcard, p, 3, dict);
        tally.compare(et, Metric::wildcard, p, 3, dict, QueryOptions{true});
      }
  }
  const std::uint32_t ms[] = {8, 16, 32};
  for (std::size_t t = 0; t < 12; ++t) {
    const std::vector<std::vector<Symbol>> data = {random_sequence(rng, rng.between(1000, 20000), 4)};
    const ErrorTree et = build(data, IndexMode::text, 3, false, ms[t % 3]);
    for (std::uint32_t w = 0; w <= 3; ++w)
      for (const auto& p : sample_patterns(rng, et, Metric::wildcard, w, 5)) tally.compare(et, Metric::wildcard, p, 3, data);
  }
  return tally.outcome("w <= 3 over 60 dictionaries and 12 texts");
}

Outcome substitution_walks() {
  Rng rng(105);
  std::size_t failures = 0, triples2 = 0, triples5 = 0;
  std::string first;
  auto fail = [&](const std::string& why) {
    if (failures++ == 0) first = why;
  };
  for (int batch = 0; batch < 20; ++batch) {
    const auto dict = random_dictionary(rng, rng.between(20, 200), 8, 32, 4);
    const auto kst = build_gst(std::make_shared<SymbolArena>(dict));
    for (int i = 0; i < 50; ++i) {
      // One substitution at x: the suffixes after x end at the same leaf.
      const std::uint32_t id = rng.below(static_cast<std::uint32_t>(dict.size()));
      const auto& s1 = dict[id];
      const std::uint32_t x = rng.between(1, static_cast<std::uint32_t>(s1.size()) - 1);
      auto s2 = s1;
      s2[x - 1] = static_cast<Symbol>((s2[x - 1] + rng.between(1, 3)) % 4);
      ++triples2;
      if (avn(kst, std::span<const Symbol>(s2).subspan(x)).last_node() != avn_last(kst, SuffixRef{id, x + 1}))
        fail("single substitution at " + std::to_string(x) + " in " + render(s1));

      // k substitutions: each error-free segment walks identically.
      const std::uint32_t k = rng.between(1, std::min<std::uint32_t>(4, static_cast<std::uint32_t>(s1.size())));
      std::set<std::uint32_t> pos;
      while (pos.size() < k) pos.insert(rng.between(1, static_cast<std::uint32_t>(s1.size())));
      auto s3 = s1;
      for (auto p : pos) s3[p - 1] = static_cast<Symbol>((s3[p - 1] + rng.between(1, 3)) % 4);
      ++triples5;
      std::vector<std::uint32_t> cuts(pos.begin(), pos.end());
      cuts.push_back(static_cast<std::uint32_t>(s1.size()) + 1);
      std::uint32_t prev = 0;
      for (auto c : cuts) {
        auto seg1 = std::span<const Symbol>(s1).subspan(prev, c - prev - 1);
        auto seg3 = std::span<const Symbol>(s3).subspan(prev, c - prev - 1);
        const auto a = avn(kst, seg1), b = avn(kst, seg3);
        if (a.entries != b.entries || a.matched_len != b.matched_len || a.matched_len != seg1.size())
          fail("segment [" + std::to_string(prev + 1) + "," + std::to_string(c - 1) + "] of " + render(s1));
        prev = c;
      }
      const std::uint32_t last = cuts[cuts.size() - 2];
      if (last < s1.size() &&
          avn(kst, std::span<const Symbol>(s3).subspan(last)).last_node() != avn_last(kst, SuffixRef{id, last + 1}))
        fail("final segment after " + std::to_string(last) + " of " + render(s1));
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(triples2) + " single-substitution and " + std::to_string(triples5) +
             " multi-substitution triples, " + std::to_string(failures) + " failures";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome structure() {
  Rng rng(106);
  std::size_t trim_failures = 0;
  for (int t = 0; t < 100; ++t) {
    const auto text = random_sequence(rng, rng.between(1, 5000), rng.between(2, 4));
    const auto gst = build_gst(std::make_shared<SymbolArena>(std::vector<std::vector<Symbol>>{text}));
    g_structure.check(gst, g_structure_rng);
    const auto trimmed = trim_to_depth(gst, rng.between(1, 40));
    std::multiset<std::uint32_t> before, after;
    for (const auto& n : gst.nodes())
      for (const auto& l : n.labels) before.insert(l.start);
    for (const auto& n : trimmed.nodes())
      for (const auto& l : n.labels) after.insert(l.start);
    if (before != after) ++trim_failures;
  }
  Outcome o;
  o.pass = g_structure.failures == 0 && trim_failures == 0;
  o.detail = std::to_string(g_structure.trees) + " suffix trees checked (" + std::to_string(g_structure.failures) +
             " failures), trim label preservation on 100 texts (" + std::to_string(trim_failures) + " failures)";
  if (!g_structure.first.empty()) o.detail += "; first: " + g_structure.first;
  return o;
}

// Built once and shared by the growth and latency criteria.
struct GrowthIndex {
  std::uint32_t n = 0;
  ErrorTree et;
};
std::vector<GrowthIndex>& growth_indexes() {
  static std::vector<GrowthIndex> built = [] {
    std::vector<GrowthIndex> v;
    Rng rng(107);
    for (std::uint32_t n : {1000u, 2000u, 4000u, 8000u}) v.push_back({n, build(random_dictionary(rng, n, 24, 24, 4), IndexMode::dictionary, 1, false)});
    return v;
  }();
  return built;
}

Outcome growth() {
  double lo = 1e300, hi = 0;
  std::ostringstream curve;
  for (const auto& g : growth_indexes()) {
    const double entries = static_cast<double>(stats(g.et).total_entries);
    const double ratio = entries / (g.n * std::log(static_cast<double>(g.n)) / std::log(4.0));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sN=%u:%.0f/%.3f", g.n == 1000 ? "" : " ", g.n, entries, ratio);
    curve << buf;
  }
  Outcome o;
  o.pass = hi > 0 && hi / lo < 4.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "; spread %.2fx", hi / lo);
  o.detail = "entries/ratio " + curve.str() + buf;
  return o;
}

Outcome round_trip() {
  Rng rng(108);
  std::size_t fixtures = 0, mismatched = 0, queries = 0;
  std::string first;
  struct Setup {
    IndexMode mode;
    bool indels;
    Metric metric;
  };
  const Setup setups[] = {{IndexMode::dictionary, false, Metric::hamming},
                        {IndexMode::dictionary, true, Metric::edit},
                        {IndexMode::dictionary, false, Metric::wildcard},
                        {IndexMode::text, false, Metric::hamming},
                        {IndexMode::text, true, Metric::edit}};
  for (int rep = 0; rep < 4; ++rep)
    for (const auto& s : setups) {
      std::vector<std::vector<Symbol>> data;
      std::uint32_t m = 0;
      if (s.mode == IndexMode::text) {
        data = {random_sequence(rng, rng.between(500, 5000), 4)};
        m = rng.between(6, 20);
      } else {
        data = dictionary_fixture(rng);
      }
      const ErrorTree et = build(data, s.mode, 2, s.indels, m);
      const auto bytes = serialize(et);
      const ErrorTree copy = deserialize(bytes);
      ++fixtures;
      bool ok = serialize(et) == bytes && serialize(copy) == bytes && stats(copy) == stats(et);
      for (const auto& p : sample_patterns(rng, et, s.metric, 2, 50)) {
        ++queries;
        ok = ok && query(et, s.metric, p, 2) == query(copy, s.metric, p, 2);
      }
      if (!ok && mismatched++ == 0) first = std::string(metric_name(s.metric)) + (s.mode == IndexMode::text ? " text" : " dictionary");
    }
  Outcome o;
  o.pass = mismatched == 0;
  o.detail = std::to_string(fixtures) + " fixtures, " + std::to_string(queries) + " queries, " +
             std::to_string(mismatched) + " mismatches (bytes, stats or answers)";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// Independent re-verification of a reported match.
std::optional<std::size_t> true_distance(const ErrorTree& et, const std::vector<std::vector<Symbol>>& data, Metric metric,
                                         std::span<const Symbol> p, const MatchResult& r, std::uint32_t k) {
  std::span<const Symbol> target;
  if (et.mode == IndexMode::dictionary) {
    if (r.subject >= data.size()) return std::nullopt;
    target = data[r.subject];
  } else {
    if (r.subject == 0 || r.subject > data[0].size()) return std::nullopt;
    target = std::span<const Symbol>(data[0]).subspan(r.subject - 1);
  }
  if (metric == Metric::edit) {
    if (et.mode == IndexMode::dictionary) return edit_distance(target, p);
    std::size_t best = SIZE_MAX;
    for (std::size_t len = p.size() > k ? p.size() - k : 0; len <= p.size() + k && len <= target.size(); ++len)
      best = std::min(best, edit_distance(target.first(len), p));
    return best;
  }
  if (et.mode == IndexMode::text) {
    if (target.size() < p.size()) return std::nullopt;
    target = target.first(p.size());
  }
  if (target.size() != p.size()) return std::nullopt;
  if (metric == Metric::wildcard) return wildcard_mismatches(p, target, kWildcard);
  return hamming_distance(target, p);
}

Outcome fuzz() {
  Rng rng(109);
  struct Fixture {
    std::vector<std::vector<Symbol>> data;
    ErrorTree et;
  };
  std::vector<Fixture> fixtures;
  for (int i = 0; i < 3; ++i) {
    auto dict = dictionary_fixture(rng);
    fixtures.push_back({dict, build(dict, IndexMode::dictionary, 3, false)});
    auto dict2 = dictionary_fixture(rng);
    fixtures.push_back({dict2, build(dict2, IndexMode::dictionary, 2, true)});
    std::vector<std::vector<Symbol>> text = {random_sequence(rng, rng.between(200, 3000), 4)};
    const std::uint32_t m = rng.between(4, 24);
    fixtures.push_back({text, build(text, IndexMode::text, 2, false, m)});
    fixtures.push_back({text, build(text, IndexMode::text, 2, true, m)});
  }
  std::size_t answered = 0, rejected = 0, bad = 0, missed = 0, crashes = 0;
  std::string first;
  for (int q = 0; q < 10000; ++q) {
    const auto& f = fixtures[rng.below(static_cast<std::uint32_t>(fixtures.size()))];
    // Mostly queries the index accepts, with a steady share of invalid ones.
    Metric metric = static_cast<Metric>(rng.below(3));
    if (metric == Metric::edit && !f.et.indels && rng.below(4) != 0) metric = Metric::hamming;
    const std::uint32_t k = rng.below(8) == 0 ? f.et.k + 1 : rng.below(f.et.k + 1);
    std::size_t len;
    switch (rng.below(8)) {
      case 0: len = 1; break;
      case 1: len = 33 + rng.below(8); break;
      case 2: len = rng.between(0, 40); break;
      default: len = f.et.mode == IndexMode::text ? f.et.m : rng.between(8, 32);
    }
    std::vector<Symbol> p;
    if (f.et.mode == IndexMode::text && len == f.et.m && rng.below(2) == 0 && f.data[0].size() >= len) {
      const auto start = rng.below(static_cast<std::uint32_t>(f.data[0].size() - len + 1));
      p = plant_errors(rng, std::span<const Symbol>(f.data[0]).subspan(start, len), Planting{rng.below(k + 1), 0, 0}, 4);
    } else {
      p = random_sequence(rng, len, 4);
    }
    if (metric == Metric::wildcard && !p.empty()) {
      const std::uint32_t w = rng.below(8) == 0 ? k + 1 : rng.below(std::min<std::uint32_t>(k, 3) + 1);
      add_wildcards(rng, p, std::min<std::uint32_t>(w, static_cast<std::uint32_t>(p.size())));
    }
    if (rng.below(50) == 0 && !p.empty()) p[rng.below(static_cast<std::uint32_t>(p.size()))] = 9;  // outside the alphabet
    try {
      const auto rs = query(f.et, metric, p, k);
      ++answered;
      for (const auto& r : rs) {
        const auto d = true_distance(f.et, f.data, metric, p, r, k);
        if (!d || *d > k || *d != r.distance) {
          if (bad++ == 0) first = std::string(metric_name(metric)) + " k=" + std::to_string(k) + " P=" + render(p);
        }
      }
      if (rs != scan(f.et.mode, metric, f.data, p, k) && missed++ == 0 && first.empty())
        first = std::string("scan disagrees: ") + metric_name(metric) + " k=" + std::to_string(k) + " P=" + render(p);
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      if (crashes++ == 0) first = std::string("unexpected exception: ") + e.what();
    }
  }
  Outcome o;
  o.pass = bad == 0 && missed == 0 && crashes == 0;
  o.detail = "10000 queries: " + std::to_string(answered) + " answered, " + std::to_string(rejected) +
             " rejected with a typed error, " + std::to_string(bad) + " unverifiable results, " +
             std::to_string(missed) + " disagreeing with the scan, " + std::to_string(crashes) + " crashes";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome latency() {
  // Corpus recipe of criterion 1 (lengths 8..32, sigma 4) scaled to N = 8000.
  Rng rng(110);
  const auto dict = random_dictionary(rng, 8000, 8, 32, 4);
  const ErrorTree et = build(dict, IndexMode::dictionary, 1, false);
  const auto patterns = sample_patterns(rng, et, Metric::hamming, 1, 1000);
  const BenchRow row = run_bench(et, Metric::hamming, 1, patterns, "N=8000", true);
  const double speedup = row.median_us > 0 ? row.oracle_median_us / row.median_us : 0;

  // For context only: the equal-length N=8000 index of the growth check.
  const auto& g = growth_indexes().back();
  const auto same_len = sample_patterns(rng, g.et, Metric::hamming, 1, 1000);
  const BenchRow eq = run_bench(g.et, Metric::hamming, 1, same_len, "N=8000 equal length", true);
  const double eq_speedup = eq.median_us > 0 ? eq.oracle_median_us / eq.median_us : 0;

  char buf[320];
  std::snprintf(buf, sizeof buf,
                "N=8000 k=1 lengths 8..32: index median %.1fus p95 %.1fus, scan median %.1fus, speedup %.1fx "
                "(equal length 24: index %.1fus, scan %.1fus, %.1fx)",
                row.median_us, row.p95_us, row.oracle_median_us, speedup, eq.median_us, eq.oracle_median_us,
                eq_speedup);
  Outcome o;
  o.pass = speedup >= 10.0;
  o.detail = buf;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"1", "dictionary Hamming equals brute force", dictionary_hamming},
      {"2", "dictionary edit equals brute force", dictionary_edit},
      {"3", "text Hamming and edit equal brute force", text_mode},
      {"4", "wildcard queries equal brute force", wildcard},
      {"5", "substitution suffix and segment walk equalities", substitution_walks},
      {"6", "suffix tree leaf, spelling and trim invariants", structure},
      {"7", "table size grows like N log N at k=1", growth},
      {"8", "save/load answers identically and is byte-deterministic", round_trip},
      {"9", "fuzzed queries are answered exactly or rejected with a typed error", fuzz},
      {"perf", "index median latency at least 10x below the scan (random dictionary, lengths 8-32, N=8000, k=1)", latency},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = clock_type::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    std::printf("%s [%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
