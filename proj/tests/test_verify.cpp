#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "frolov/verify.hpp"
#include "test_support.hpp"

using namespace frolov;
using frolov::test::collect_stream;
using frolov::test::k_set;
using frolov::test::random_box;

TEST(Oracle, LevelZero) {
  const auto pts = oracle_enumerate(Level(0), Box{{-1.5}, {1.5}});
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].k[0], -1);
  EXPECT_EQ(pts[2].k[0], 1);
}

TEST(Oracle, SquareTwo) {
  const auto pts = oracle_enumerate(Level(1), Box::symmetric(2, 2.0));
  const std::set<std::vector<std::int64_t>> expected{{-2, 0}, {-1, 0}, {0, 0}, {1, 0},
                                                     {2, 0},  {0, 1},  {0, -1}};
  EXPECT_EQ(k_set(pts), expected);
}

TEST(Oracle, SmallestCubatureBoxAtDimensionFour) {
  EXPECT_EQ(oracle_enumerate(Level(2), standard_box(CubatureSpec(Level(2), 2.0))).size(), 5u);
}

TEST(Oracle, RefusesLargeLevels) {
  EXPECT_THROW(oracle_enumerate(Level(4), Box::symmetric(16, 1.0)), CostError);
}

TEST(Oracle, EmptyBox) {
  EXPECT_TRUE(oracle_enumerate(Level(1), Box{{1.0, 0.0}, {0.0, 1.0}}).empty());
}

TEST(Oracle, EquivalenceOnRandomBoxes) {
  std::mt19937_64 rng(424242);
  for (int n = 0; n <= 3; ++n) {
    const Level level(n);
    const auto ladder = build_diag_ladder(level);
    for (int trial = 0; trial < 100; ++trial) {
      const auto box = random_box(rng, level.dim());
      const auto oracle = k_set(oracle_enumerate(level, box));
      EXPECT_EQ(oracle, k_set(enumerate_recursive(level, box, ladder)))
          << "n=" << n << " trial=" << trial;
      EXPECT_EQ(oracle, k_set(collect_stream(level, box, ladder)));
    }
  }
}

TEST(DoubleBox, Examples) {
  const auto r = double_box_check(Level(2), 64.0);
  EXPECT_EQ(r.count_direct, 71u);
  EXPECT_EQ(r.count_filtered, 71u);
  EXPECT_TRUE(r.agree);

  const auto r1 = double_box_check(Level(1), 2.0);
  EXPECT_EQ(r1.count_direct, 3u);
  EXPECT_EQ(r1.count_filtered, 3u);
  EXPECT_TRUE(r1.agree);

  EXPECT_TRUE(double_box_check(Level(0), 1.0).agree);
}

TEST(DoubleBox, InnerSetIsSubsetOfOuter) {
  for (int n = 0; n <= 3; ++n) {
    const Level level(n);
    const auto ladder = build_diag_ladder(level);
    for (int m = 1; m <= 8; ++m) {
      const auto inner = k_set(collect_stream(level, standard_box(CubatureSpec::from_log2(level, m)), ladder));
      const auto outer = k_set(collect_stream(level, standard_box(CubatureSpec::from_log2(level, m + 1)), ladder));
      EXPECT_TRUE(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
    }
  }
}

TEST(Unimodular, PassesUpToLevelThree) {
  const auto r0 = unimodular_check(Level(0));
  EXPECT_EQ(r0.max_integer_deviation, 0.0);
  EXPECT_EQ(r0.det_deviation, 0.0);
  EXPECT_TRUE(r0.pass);
  for (int n = 1; n <= 3; ++n) {
    const auto r = unimodular_check(Level(n));
    EXPECT_TRUE(r.pass) << "n=" << n << " int=" << r.max_integer_deviation
                        << " det=" << r.det_deviation;
  }
  EXPECT_THROW(unimodular_check(Level(4)), CostError);
}

TEST(GoldenTable, EmbeddedRowsMatchCsvAsset) {
  const auto csv = load_golden_csv(FROLOV_GOLDEN_CSV);
  ASSERT_EQ(csv.size(), kGoldenCounts.size());
  EXPECT_TRUE(std::equal(csv.begin(), csv.end(), kGoldenCounts.begin()));
}

TEST(GoldenTable, ParserRejectsBadInput) {
  std::istringstream bad_header("dim,m,count\n2,1,3\n");
  EXPECT_THROW(parse_golden_csv(bad_header), std::runtime_error);
  std::istringstream bad_row("d,log2N,count\n2,1\n");
  EXPECT_THROW(parse_golden_csv(bad_row), std::runtime_error);
}

TEST(GoldenTable, SpotValues) {
  auto find = [](std::size_t d, int m) {
    for (const auto& r : kGoldenCounts) {
      if (r.d == d && r.log2N == m) return r.expected_count;
    }
    return std::uint64_t{0};
  };
  EXPECT_EQ(find(2, 10), 1027u);
  EXPECT_EQ(find(4, 20), 1048609u);
  EXPECT_EQ(find(16, 1), 77u);
  EXPECT_EQ(find(32, 2), 4105u);
  EXPECT_EQ(find(32, 30), 1208920345u);
}

TEST(ReproduceTable, DimensionTwo) {
  const auto rows = reproduce_table(Level(1), 10);
  ASSERT_EQ(rows.size(), 10u);
  const std::uint64_t expected[] = {3, 5, 7, 15, 31, 65, 131, 257, 513, 1027};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].observed, expected[i]);
    EXPECT_TRUE(rows[i].match);
  }
}

TEST(ReproduceTable, HighDimensionRows) {
  const auto rows = reproduce_rows({{16, 1, 77}, {32, 2, 4105}});
  EXPECT_TRUE(rows[0].match);
  EXPECT_TRUE(rows[1].match);
}

TEST(ReproduceTable, DetectsMismatch) {
  const auto rows = reproduce_rows({{2, 1, 4}});
  EXPECT_EQ(rows[0].observed, 3u);
  EXPECT_FALSE(rows[0].match);
}
