#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dustgrcm/rank.hpp"
#include "oracles.hpp"

namespace dustgrcm {
namespace {

TEST(WindowRank, SmallExamples) {
  EXPECT_EQ(window_rank({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 3);
  EXPECT_EQ(window_rank({{1, 2, 3}, {2, 4, 6}, {3, 6, 9}}), 1);
  EXPECT_EQ(window_rank({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}), 0);
  EXPECT_EQ(window_rank({{0, 0, 5}, {0, 0, 7}, {0, 0, 1}}), 1);
  EXPECT_EQ(window_rank({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}), 2);
}

TEST(WindowRank, RejectsNonSquare) {
  const std::vector<int> six(6, 1);
  try {
    window_rank(six, 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonSquareWindow);
  }
  EXPECT_THROW(window_rank({{1, 2}, {3}}), Error);
}

TEST(WindowRank, MatchesRationalOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 3 + 2 * std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    const auto a = oracle::random_window(rng, n, 255);
    ASSERT_EQ(window_rank(a, n, n), oracle::rational_rank(a, n)) << "n=" << n << " trial " << trial;
  }
}

TEST(WindowRank, WideIntegerPathsAgree) {
  // Force every integer width on the same 9x9 full-scale input.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_window(rng, 9, 255);
    const int expected = oracle::rational_rank(a, 9);
    std::vector<detail::Int256> w256(a.begin(), a.end());
    std::vector<detail::BigInt> big(a.begin(), a.end());
    EXPECT_EQ(detail::bareiss_rank<detail::Int256>(w256, 9), expected);
    EXPECT_EQ(detail::bareiss_rank<detail::BigInt>(big, 9), expected);
  }
  EXPECT_EQ(detail::select_rank_int(3, 255), detail::RankIntKind::I64);
  EXPECT_EQ(detail::select_rank_int(9, 255), detail::RankIntKind::I256);
  EXPECT_EQ(detail::select_rank_int(15, 255), detail::RankIntKind::Big);
}

TEST(WindowRank, PermutationTranspositionAndRepeatedRows) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + 2 * std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    const auto a = oracle::random_window(rng, n, 255);
    const int r = window_rank(a, n, n);

    std::vector<std::size_t> rows(n), cols(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<int> permuted(n * n), transposed(n * n), repeated = a;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        permuted[i * n + j] = a[rows[i] * n + cols[j]];
        transposed[i * n + j] = a[j * n + i];
      }
    }
    std::copy_n(a.begin(), n, repeated.begin() + static_cast<std::ptrdiff_t>(n));  // row 1 := row 0
    EXPECT_EQ(window_rank(permuted, n, n), r);
    EXPECT_EQ(window_rank(transposed, n, n), r);
    EXPECT_LT(window_rank(repeated, n, n), static_cast<int>(n));
  }
}

TEST(RankLevel, DefaultOperatingPointIsBijective) {
  const RankConfig cfg{3, 3};
  EXPECT_EQ(rank_level(0, cfg), 0);
  EXPECT_EQ(rank_level(1, cfg), 0);
  EXPECT_EQ(rank_level(2, cfg), 1);
  EXPECT_EQ(rank_level(3, cfg), 2);
}

TEST(RankLevel, AlwaysInRange) {
  for (int w = 3; w <= 11; w += 2) {
    for (int levels = 1; levels <= w; ++levels) {
      const RankConfig cfg{w, levels};
      int prev = 0;
      for (int r = 0; r <= w; ++r) {
        const int l = rank_level(r, cfg);
        EXPECT_GE(l, prev);
        EXPECT_LT(l, levels);
        prev = l;
      }
      EXPECT_EQ(rank_level(w, cfg), levels - 1);
    }
  }
}

TEST(RankConfig, Validation) {
  EXPECT_THROW((RankConfig{4, 3}.validate()), Error);
  EXPECT_THROW((RankConfig{1, 1}.validate()), Error);
  EXPECT_THROW((RankConfig{3, 4}.validate()), Error);
  EXPECT_THROW((RankConfig{3, 0}.validate()), Error);
  EXPECT_NO_THROW((RankConfig{9, 9}.validate()));
}

QuantizedImage from_rows(const std::vector<std::vector<int>>& rows, int gray_levels = 256) {
  QuantizedImage q;
  q.height = rows.size();
  q.width = rows.front().size();
  q.gray_levels = gray_levels;
  for (const auto& r : rows)
    for (int v : r) q.levels.push_back(static_cast<std::uint8_t>(v));
  return q;
}

TEST(RankMatrix, ConstantImage) {
  QuantizedImage q{6, 5, 256, std::vector<std::uint8_t>(30, 7)};
  const auto m = rank_matrix(q, {3, 3});
  EXPECT_EQ(m.valid_width, 4u);
  EXPECT_EQ(m.valid_height, 3u);
  EXPECT_TRUE(std::all_of(m.raw_ranks.begin(), m.raw_ranks.end(), [](auto r) { return r == 1; }));
  EXPECT_TRUE(std::all_of(m.levels.begin(), m.levels.end(), [](auto l) { return l == 0; }));
}

TEST(RankMatrix, DominantDiagonalPatternIsFullRank) {
  // One bright pixel per row/column of every 3x3 window, in distinct columns.
  QuantizedImage q{12, 10, 256, {}};
  for (std::size_t y = 0; y < q.height; ++y)
    for (std::size_t x = 0; x < q.width; ++x) q.levels.push_back((x + 2 * y) % 3 == 0 ? 200 : 10);
  const auto m = rank_matrix(q, {3, 3});
  for (std::size_t y = 0; y < m.valid_height; ++y) {
    for (std::size_t x = 0; x < m.valid_width; ++x) {
      std::vector<int> win;
      for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) win.push_back(q.at(x + c, y + r));
      ASSERT_EQ(oracle::rational_rank(win, 3), 3);
      EXPECT_EQ(m.level_at(x, y), 2);
    }
  }
}

TEST(RankMatrix, MarginArithmetic) {
  QuantizedImage q4{4, 4, 256, std::vector<std::uint8_t>(16, 1)};
  const auto m = rank_matrix(q4, {3, 3});
  EXPECT_EQ(m.valid_width, 2u);
  EXPECT_EQ(m.valid_height, 2u);
  EXPECT_EQ(m.margin, 1u);

  for (int w = 3; w <= 9; w += 2) {
    QuantizedImage q{20, 13, 256, std::vector<std::uint8_t>(20 * 13, 3)};
    const auto mw = rank_matrix(q, {w, 3});
    EXPECT_EQ(mw.valid_width, 20u - 2 * (w / 2));
    EXPECT_EQ(mw.valid_height, 13u - 2 * (w / 2));
  }
}

TEST(RankMatrix, ImageTooSmall) {
  QuantizedImage q{2, 5, 256, std::vector<std::uint8_t>(10, 1)};
  try {
    rank_matrix(q, {3, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ImageTooSmall);
  }
}

TEST(RankMatrix, HandEnumerated4x4) {
  // levels after L_I = 4 quantization; raw ranks verified by exact elimination
  const auto q = from_rows({{0, 3, 0, 1}, {1, 1, 1, 1}, {2, 0, 3, 0}, {0, 0, 0, 0}}, 4);
  const auto m = rank_matrix(q, {3, 3});
  EXPECT_EQ(m.raw_ranks, (std::vector<std::uint8_t>{3, 3, 2, 2}));
  EXPECT_EQ(m.levels, (std::vector<std::uint8_t>{2, 2, 1, 1}));
}

TEST(RankMatrix, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(9);
  const auto img = oracle::random_image(rng, 61, 47);
  for (int w : {3, 5}) {
    const auto q = quantize_gray(img, 16);
    const auto single = rank_matrix(q, {w, 3}, 1);
    for (unsigned t : {2u, 3u, 8u, 100u}) {
      EXPECT_EQ(rank_matrix(q, {w, 3}, t), single) << "threads=" << t;
    }
  }
}

TEST(RankMatrix, DebugPixelsStretchLevels) {
  RankMatrix m;
  m.config = {3, 3};
  m.levels = {0, 1, 2};
  EXPECT_EQ(rank_levels_as_pixels(m), (std::vector<std::uint8_t>{0, 127, 255}));
}

}  // namespace
}  // namespace dustgrcm
