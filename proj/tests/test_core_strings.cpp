#include <gtest/gtest.h>

#include <sstream>

#include "errortree/arena.hpp"
#include "errortree/distance.hpp"
#include "errortree/errors.hpp"
#include "errortree/input.hpp"
#include "errortree/workload.hpp"
#include "test_util.hpp"

using namespace errortree;

TEST(HammingDistance, Examples) {
  EXPECT_EQ(hamming_distance("ABC", "ABC"), 0u);
  EXPECT_EQ(hamming_distance("ACGT", "AGGT"), 1u);
  EXPECT_EQ(hamming_distance("AAAA", "TTTT"), 4u);
  EXPECT_FALSE(hamming_distance("AB", "ABC").has_value());
}

TEST(EditDistance, Examples) {
  EXPECT_EQ(edit_distance("", "abc"), 3u);
  EXPECT_EQ(edit_distance("abc", "abc"), 0u);
  EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(edit_distance("abcd", "abd"), 1u);
  EXPECT_EQ(edit_distance("flaw", "lawn"), 2u);
}

TEST(EditDistance, BoundedAgreesWithFull) {
  Rng rng(11);
  for (int it = 0; it < 2000; ++it) {
    auto a = random_sequence(rng, rng.below(12), 3);
    auto b = random_sequence(rng, rng.below(12), 3);
    const std::size_t full = edit_distance(std::span<const Symbol>(a), std::span<const Symbol>(b));
    for (std::size_t k = 0; k < 5; ++k) {
      auto bounded = bounded_edit_distance(std::span<const Symbol>(a), std::span<const Symbol>(b), k);
      if (full <= k) {
        ASSERT_TRUE(bounded.has_value());
        EXPECT_EQ(*bounded, full);
      } else {
        EXPECT_FALSE(bounded.has_value());
      }
    }
  }
}

TEST(EditDistance, BestPrefixIsMinimumOverWindows) {
  Rng rng(12);
  for (int it = 0; it < 1000; ++it) {
    auto data = random_sequence(rng, rng.below(14), 2);
    auto pat = random_sequence(rng, 1 + rng.below(6), 2);
    const std::size_t k = rng.below(3);
    std::size_t best = SIZE_MAX;
    for (std::size_t len = 0; len <= std::min(data.size(), pat.size() + k); ++len) {
      best = std::min(best, edit_distance(std::span<const Symbol>(data.data(), len), std::span<const Symbol>(pat)));
    }
    auto got = best_prefix_edit_distance(std::span<const Symbol>(data), std::span<const Symbol>(pat), k);
    if (best <= k) {
      ASSERT_TRUE(got.has_value());
      EXPECT_EQ(*got, best);
    } else {
      EXPECT_FALSE(got.has_value());
    }
  }
}

TEST(WildcardMismatch, Examples) {
  EXPECT_TRUE(wildcard_mismatch("a?c", "abc"));
  EXPECT_FALSE(wildcard_mismatch("a?c", "abd"));
  EXPECT_TRUE(wildcard_mismatch("???", "xyz"));
  EXPECT_THROW(wildcard_mismatch("a?", "abc"), ParameterError);
}

TEST(DistanceProperties, SymmetryTriangleAndOrdering) {
  Rng rng(13);
  for (int it = 0; it < 1000; ++it) {
    const std::size_t len = 1 + rng.below(10);
    auto a = random_sequence(rng, len, 4);
    auto b = random_sequence(rng, len, 4);
    auto c = random_sequence(rng, rng.below(12), 4);
    using S = std::span<const Symbol>;
    EXPECT_EQ(hamming_distance(S(a), S(b)), hamming_distance(S(b), S(a)));
    EXPECT_EQ(edit_distance(S(a), S(c)), edit_distance(S(c), S(a)));
    EXPECT_LE(edit_distance(S(a), S(c)), edit_distance(S(a), S(b)) + edit_distance(S(b), S(c)));
    EXPECT_LE(edit_distance(S(a), S(b)), *hamming_distance(S(a), S(b)));
    EXPECT_EQ(wildcard_mismatch(S(a), S(b), kWildcard), *hamming_distance(S(a), S(b)) == 0);
  }
}

TEST(Alphabet, DnaAndAscii) {
  const Alphabet d = Alphabet::dna();
  EXPECT_EQ(d.size(), 4u);
  EXPECT_EQ(d.decode(d.encode("GATTACA")), "GATTACA");
  EXPECT_THROW(d.encode("ACGN"), InputError);
  EXPECT_THROW(d.encode("AC?T"), InputError);

  const Alphabet a = Alphabet::ascii();
  EXPECT_FALSE(a.contains('?'));
  EXPECT_TRUE(a.contains('~'));
  EXPECT_EQ(a.decode(a.encode("hello, world")), "hello, world");

  auto p = d.encode_pattern("A?G", '?');
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[1], kWildcard);
  EXPECT_THROW(Alphabet::by_name("klingon"), ParameterError);
  EXPECT_THROW(Alphabet("x", "a", '?'), ParameterError);
  EXPECT_THROW(Alphabet("x", "ab?", '?'), ParameterError);
}

TEST(Arena, OffsetsAndTerminators) {
  SymbolArena arena({{0, 1}, {2}, {3, 3, 3}});
  EXPECT_EQ(arena.sequence_count(), 3u);
  EXPECT_EQ(arena.total_length(), 6u);
  EXPECT_EQ(arena.size(), 9u);
  EXPECT_EQ(arena[2], kTerminator);
  EXPECT_EQ(arena.offset(SuffixRef{2, 2}), 6u);
  EXPECT_TRUE(arena.valid(SuffixRef{1, 2}));
  EXPECT_FALSE(arena.valid(SuffixRef{1, 3}));
  EXPECT_FALSE(arena.valid(SuffixRef{3, 1}));
  EXPECT_EQ(arena.locate(7), (SuffixRef{2, 3}));
  EXPECT_EQ(arena.locate(4), (SuffixRef{1, 2}));
}

TEST(Input, DictionarySkipsBlanksAndReportsBadSymbols) {
  std::istringstream ok("ACGT\r\n\nAGGT\n");
  auto d = read_dictionary(ok, Alphabet::dna());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(Alphabet::dna().decode(d[1]), "AGGT");

  std::istringstream bad("ACGT\nACXT\n");
  try {
    read_dictionary(bad, Alphabet::dna());
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2, offset 3"), std::string::npos) << e.what();
  }

  std::istringstream empty("\n\n");
  EXPECT_THROW(read_dictionary(empty, Alphabet::dna()), InputError);
}

TEST(Input, TextAcceptsRawAndFasta) {
  std::istringstream raw("ACG\nTA\n");
  EXPECT_EQ(Alphabet::dna().decode(read_text(raw, Alphabet::dna())), "ACGTA");
  std::istringstream fasta(">chr1 first\nAC\nGT\n>chr2\nTT\n");
  EXPECT_EQ(Alphabet::dna().decode(read_text(fasta, Alphabet::dna())), "ACGTTT");
  std::istringstream none(">only header\n");
  EXPECT_THROW(read_text(none, Alphabet::dna()), InputError);
}

TEST(Input, MissingFileIsIoError) {
  EXPECT_THROW(read_input("/nonexistent/errortree/input.txt", IndexMode::dictionary, Alphabet::dna()), IoError);
}
