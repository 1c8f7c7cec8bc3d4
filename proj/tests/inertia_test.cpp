#include <gtest/gtest.h>

#include <random>

#include "dustgrcm/inertia.hpp"
#include "oracles.hpp"

namespace dustgrcm {
namespace {

GrcmProbability random_probability(std::mt19937_64& rng, int gray, int rank) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrcmProbability p{gray, rank, std::vector<double>(static_cast<std::size_t>(gray) * rank)};
  double sum = 0.0;
  for (auto& v : p.probs) sum += (v = u(rng) < 0.3 ? u(rng) : 0.0);
  if (sum == 0.0) {
    p.probs[0] = sum = 1.0;
  }
  for (auto& v : p.probs) v /= sum;
  return p;
}

TEST(MomentOfInertia, Examples) {
  GrcmProbability origin{4, 3, std::vector<double>(12, 0.0)};
  origin.probs[0] = 1.0;
  EXPECT_EQ(moment_of_inertia(origin), 0.0);

  GrcmProbability uniform{2, 2, {0.25, 0.25, 0.25, 0.25}};
  EXPECT_EQ(moment_of_inertia(uniform), 1.0);

  // all mass at gray level c, rank level 0 gives c^2
  GrcmProbability point{256, 3, std::vector<double>(768, 0.0)};
  point.probs[137 * 3] = 1.0;
  EXPECT_EQ(moment_of_inertia(point), 137.0 * 137.0);
}

TEST(MomentOfInertia, MatchesDirectSummation) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_probability(rng, 256, 3);
    const double j = moment_of_inertia(p);
    const double bound = 255.0 * 255.0 + 4.0;
    EXPECT_NEAR(j, oracle::direct_inertia(p.probs, 256, 3), 1e-12 * std::max(1.0, j));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, bound);
  }
}

TEST(MomentOfInertia, MovingMassOutwardIncreases) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> gi(0, 15), rj(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_probability(rng, 16, 3);
    const int i1 = gi(rng), j1 = rj(rng), i2 = gi(rng), j2 = rj(rng);
    const auto idx1 = static_cast<std::size_t>(i1 * 3 + j1);
    const auto idx2 = static_cast<std::size_t>(i2 * 3 + j2);
    if (i2 * i2 + j2 * j2 <= i1 * i1 + j1 * j1 || p.probs[idx1] == 0.0) continue;
    const double before = moment_of_inertia(p);
    const double delta = p.probs[idx1] / 2;
    p.probs[idx1] -= delta;
    p.probs[idx2] += delta;
    EXPECT_GT(moment_of_inertia(p), before);
  }
}

TEST(NormalizeSet, Examples) {
  const std::vector<double> table_extremes{432, 18560};
  auto n = normalize_set(table_extremes);
  EXPECT_EQ(n.s, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(n.frame.j_min, 432.0);
  EXPECT_EQ(n.frame.j_max, 18560.0);
  EXPECT_EQ(n.frame.count, 2u);

  const std::vector<double> three{0, 5, 10};
  EXPECT_EQ(normalize_set(three).s, (std::vector<double>{0.0, 0.5, 1.0}));

  // endpoints are fixed points when the output is normalized again
  const std::vector<double> any{3.5, 9.25, 4.0, 1.5, 7.0};
  const auto once = normalize_set(any);
  const auto twice = normalize_set(once.s);
  EXPECT_EQ(twice.frame.j_min, 0.0);
  EXPECT_EQ(twice.frame.j_max, 1.0);
  EXPECT_EQ(twice.s, once.s);
}

TEST(NormalizeSet, Errors) {
  const std::vector<double> one{4.0};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  try {
    normalize_set(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooFewSamples);
  }
  try {
    normalize_set(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateSet);
  }
}

TEST(NormalizeSet, PreservesOrdering) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(100.0, 20000.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> j(10);
    for (auto& v : j) v = u(rng);
    const auto n = normalize_set(j);
    for (std::size_t a = 0; a < j.size(); ++a) {
      for (std::size_t b = 0; b < j.size(); ++b) {
        if (j[a] < j[b]) {
          EXPECT_LT(n.s[a], n.s[b]);
        }
      }
    }
  }
}

TEST(NormalizeWith, EndpointsAndExtrapolation) {
  const NormalizationFrame f{432.0, 18560.0, 12};
  EXPECT_EQ(normalize_with(f.j_min, f).s, 0.0);
  EXPECT_FALSE(normalize_with(f.j_min, f).out_of_range);
  EXPECT_EQ(normalize_with(f.j_max, f).s, 1.0);
  EXPECT_FALSE(normalize_with(f.j_max, f).out_of_range);

  const auto far = normalize_with(2 * f.j_max - f.j_min, f);
  EXPECT_EQ(far.s, 2.0);
  EXPECT_TRUE(far.out_of_range);
  EXPECT_TRUE(normalize_with(100.0, f).out_of_range);
  EXPECT_LT(normalize_with(100.0, f).s, 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int k = 0; k < 100; ++k) {
    const double lo = u(rng), hi = lo + std::abs(u(rng)) + 1.0;
    const NormalizationFrame g{lo, hi, 2};
    EXPECT_EQ(normalize_with(lo, g).s, 0.0);
    EXPECT_EQ(normalize_with(hi, g).s, 1.0);
  }

  try {
    normalize_with(5.0, NormalizationFrame{3.0, 3.0, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateFrame);
  }
}

}  // namespace
}  // namespace dustgrcm
