#include <gtest/gtest.h>

#include <algorithm>

#include "errortree/distance.hpp"
#include "errortree/errors.hpp"
#include "errortree/oracle.hpp"
#include "errortree/query.hpp"
#include "errortree/workload.hpp"
#include "test_util.hpp"

using namespace errortree;
using testutil::dict_index;
using testutil::subjects;
using testutil::text_index;

namespace {

const Alphabet kDna = Alphabet::dna();
const Alphabet kAscii = Alphabet::ascii();

std::vector<MatchResult> q(const ErrorTree& et, Metric metric, const std::string& p, std::uint32_t k,
                           bool all_errors = false) {
  return query_string(et, metric, p, k, QueryOptions{all_errors});
}

bool subset(const std::vector<MatchResult>& small, const std::vector<MatchResult>& big) {
  for (const auto& r : small)
    if (std::none_of(big.begin(), big.end(), [&](const MatchResult& b) { return b.subject == r.subject; }))
      return false;
  return true;
}

}  // namespace

TEST(PreparePattern, Traces) {
  auto et = dict_index(kAscii, {"abc"}, 1);
  auto one = prepare_pattern(et, kAscii.encode("a"), 1);
  EXPECT_EQ(one.size(), 1u);
  auto exact = prepare_pattern(et, kAscii.encode("abc"), 0);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    EXPECT_NE(exact.trace(i).terminal, Terminal::fell_off);
    EXPECT_EQ(exact.trace(i).matched_len, 3 - i);
  }
  auto jumped = prepare_pattern(et, kAscii.encode("abx"), 1);
  EXPECT_EQ(jumped.trace(0).jumps, (std::vector<std::uint32_t>{3}));
  EXPECT_THROW(prepare_pattern(et, {}, 1), ParameterError);
  auto text = text_index(kDna, "ACGTACGT", 4, 1);
  EXPECT_THROW(prepare_pattern(text, kDna.encode("ACG"), 1), ModeError);
}

TEST(QueryHamming, Examples) {
  auto et = dict_index(kDna, {"ACGT", "AGGT"}, 1);
  EXPECT_EQ(q(et, Metric::hamming, "ACGT", 1),
            (std::vector<MatchResult>{{0, 0, Metric::hamming}, {1, 1, Metric::hamming}}));
  EXPECT_EQ(q(et, Metric::hamming, "ACGT", 0), (std::vector<MatchResult>{{0, 0, Metric::hamming}}));
  auto a = dict_index(kDna, {"AAAA"}, 1);
  EXPECT_TRUE(q(a, Metric::hamming, "TTTT", 1).empty());
  EXPECT_TRUE(q(a, Metric::hamming, "AAAAA", 1).empty());
  EXPECT_THROW(q(et, Metric::hamming, "ACGT", 2), CapabilityError);
  EXPECT_THROW(q(et, Metric::hamming, "", 1), ParameterError);
  EXPECT_THROW(q(et, Metric::hamming, "ACNT", 1), InputError);
}

TEST(QueryHamming, DuplicatesReportEverySubject) {
  auto et = dict_index(kDna, {"ACGT", "TTTT", "ACGT"}, 1);
  EXPECT_EQ(subjects(q(et, Metric::hamming, "ACGA", 1)), (std::vector<std::uint32_t>{0, 2}));
}

TEST(QueryEdit, Examples) {
  auto et = dict_index(kAscii, {"abcd"}, 1, true);
  EXPECT_EQ(q(et, Metric::edit, "abd", 1), (std::vector<MatchResult>{{0, 1, Metric::edit}}));
  auto abc = dict_index(kAscii, {"abc"}, 1, true);
  EXPECT_EQ(q(abc, Metric::edit, "abcx", 1), (std::vector<MatchResult>{{0, 1, Metric::edit}}));
  EXPECT_EQ(q(abc, Metric::edit, "abc", 0), (std::vector<MatchResult>{{0, 0, Metric::edit}}));
  auto pair = dict_index(kAscii, {"abc", "ac"}, 1, true);
  EXPECT_EQ(subjects(q(pair, Metric::edit, "ac", 1)), (std::vector<std::uint32_t>{0, 1}));
  auto no_indels = dict_index(kAscii, {"abc"}, 1, false);
  EXPECT_THROW(q(no_indels, Metric::edit, "abc", 1), CapabilityError);
  EXPECT_EQ(q(no_indels, Metric::edit, "abc", 0).size(), 1u);
}

TEST(QueryWildcard, Examples) {
  auto et = dict_index(kDna, {"AAG", "ACG", "TTT"}, 3);
  EXPECT_EQ(subjects(q(et, Metric::wildcard, "A?G", 1)), (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(subjects(q(et, Metric::wildcard, "???", 3)), (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(q(et, Metric::wildcard, "ACG", 1).size(), 1u);
  EXPECT_EQ(subjects(q(et, Metric::wildcard, "ACG", 1, true)), (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(subjects(q(et, Metric::wildcard, "T?G", 2, true)), (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_THROW(q(et, Metric::wildcard, "A??", 1), ParameterError);
}

TEST(QueryText, Examples) {
  auto abab = text_index(kAscii, "abab", 2, 1);
  EXPECT_EQ(subjects(q(abab, Metric::hamming, "ab", 0)), (std::vector<std::uint32_t>{1, 3}));
  auto aaaa = text_index(kAscii, "aaaa", 2, 1);
  EXPECT_EQ(subjects(q(aaaa, Metric::hamming, "ab", 1)), (std::vector<std::uint32_t>{1, 2, 3}));
  auto abcb = text_index(kAscii, "abcb", 2, 1);
  EXPECT_THROW(q(abcb, Metric::hamming, "abab", 1), ModeError);
  EXPECT_THROW(query_text_hamming(dict_index(kAscii, {"ab"}, 1), kAscii.encode("ab"), 1), ModeError);
  EXPECT_THROW(query_hamming(abab, kAscii.encode("ab"), 1), ModeError);

  auto edit = text_index(kAscii, "abcd", 3, 1, true);
  EXPECT_EQ(subjects(query_text_edit(edit, kAscii.encode("abd"), 1)), (std::vector<std::uint32_t>{1}));
  auto xyz = text_index(kAscii, "xyz", 3, 1, true);
  EXPECT_TRUE(query_text_edit(xyz, kAscii.encode("abc"), 1).empty());
}

TEST(QueryProperties, MonotoneInKAndHammingWithinEdit) {
  Rng rng(41);
  for (int it = 0; it < 15; ++it) {
    auto dict = random_dictionary(rng, 20 + rng.below(40), 6, 10, 4);
    BuildOptions o;
    o.k = 2;
    o.indels = true;
    auto et = build_index(kDna, dict, o);
    for (int j = 0; j < 10; ++j) {
      auto p = plant_errors(rng, dict[rng.below(dict.size())], Planting{rng.below(3), 0, 0}, 4);
      const auto h0 = query(et, Metric::hamming, p, 0);
      const auto h1 = query(et, Metric::hamming, p, 1);
      const auto h2 = query(et, Metric::hamming, p, 2);
      const auto e0 = query(et, Metric::edit, p, 0);
      const auto e2 = query(et, Metric::edit, p, 2);
      EXPECT_TRUE(subset(h0, h1));
      EXPECT_TRUE(subset(h1, h2));
      EXPECT_EQ(subjects(h0), subjects(e0));
      for (const auto& h : h2) {
        auto it2 = std::find_if(e2.begin(), e2.end(), [&](const MatchResult& e) { return e.subject == h.subject; });
        ASSERT_NE(it2, e2.end());
        EXPECT_LE(it2->distance, h.distance);
      }
    }
  }
}

TEST(QueryProperties, MatchesOracleOnSmallCorpora) {
  Rng rng(42);
  for (int it = 0; it < 30; ++it) {
    const bool text = it % 3 == 2;
    BuildOptions o;
    o.k = 1 + rng.below(2);
    o.indels = rng.below(2) == 1;
    std::vector<std::vector<Symbol>> data;
    if (text) {
      o.mode = IndexMode::text;
      o.m = 4 + rng.below(6);
      data = {random_sequence(rng, 50 + rng.below(300), 2 + rng.below(3))};
    } else {
      data = random_dictionary(rng, 5 + rng.below(40), 4, 14, 3);
    }
    auto et = build_index(kDna, data, o);
    for (Metric metric : {Metric::hamming, Metric::edit, Metric::wildcard}) {
      if (metric == Metric::edit && !o.indels) continue;
      Rng prng(rng.next());
      for (const auto& p : sample_patterns(prng, et, metric, o.k, 20)) {
        EXPECT_EQ(query(et, metric, p, o.k), scan(o.mode, metric, data, p, o.k)) << metric_name(metric);
      }
    }
  }
}

TEST(QueryProperties, ResultsAreVerifiedAndSorted) {
  Rng rng(43);
  auto dict = random_dictionary(rng, 60, 5, 9, 4);
  BuildOptions o;
  o.k = 2;
  o.indels = true;
  auto et = build_index(kDna, dict, o);
  for (int j = 0; j < 50; ++j) {
    auto p = random_sequence(rng, 5 + rng.below(5), 4);
    auto rs = query(et, Metric::edit, p, 2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (i) EXPECT_LT(rs[i - 1].subject, rs[i].subject);
      EXPECT_EQ(rs[i].distance,
                edit_distance(std::span<const Symbol>(dict[rs[i].subject]), std::span<const Symbol>(p)));
      EXPECT_LE(rs[i].distance, 2u);
    }
  }
}

TEST(PatternKeys, AgreeWithDataSideForExactTail) {
  auto et = dict_index(kAscii, {"abcde", "abxde"}, 1);
  const auto p = kAscii.encode("abcde");
  auto pk = pattern_keys(et, p, 3, 0, Metric::hamming);
  auto dk = segment_keys(et.kst, et.arena->offset(SuffixRef{0, 4}), 2, 0, false);
  EXPECT_EQ(pk, dk);
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("edit"), Metric::edit);
  EXPECT_STREQ(metric_name(Metric::wildcard), "wildcard");
  EXPECT_THROW(parse_metric("levenshtein"), ParameterError);
}
