#include <gtest/gtest.h>

#include "corf/error.hpp"
#include "corf/random.hpp"
#include "corf/split.hpp"
#include "oracles.hpp"

namespace corf {
namespace {

TEST(GiniImpurity, Examples) {
  EXPECT_DOUBLE_EQ(gini_impurity({2, 2}), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity({4, 0}), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity({6, 2}), 0.375);
}

TEST(GiniImpurity, EmptyNodeIsAnError) { EXPECT_THROW(gini_impurity({0, 0}), ContractError); }

TEST(FindBestSplit, SeparatingThreshold) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<std::uint8_t> y{0, 0, 1, 1};
  const auto s = find_best_split(x, y);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->threshold, 2.5);
  EXPECT_DOUBLE_EQ(s->impurity_decrease, 0.5);
}

TEST(FindBestSplit, ConstantVariable) {
  const std::vector<double> x{7, 7, 7};
  const std::vector<std::uint8_t> y{0, 1, 0};
  EXPECT_FALSE(find_best_split(x, y));
}

TEST(FindBestSplit, TieGoesToSmallestThreshold) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<std::uint8_t> y{0, 1, 0, 1};
  const auto s = find_best_split(x, y);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->threshold, 1.5);
  EXPECT_NEAR(s->impurity_decrease, 1.0 / 6.0, 1e-15);
}

TEST(FindBestSplit, PureNodeHasNoSplit) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<std::uint8_t> y{1, 1, 1};
  EXPECT_FALSE(find_best_split(x, y));
}

TEST(FindBestSplit, LengthMismatch) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<std::uint8_t> y{0, 1};
  EXPECT_THROW(find_best_split(x, y), ContractError);
}

TEST(FindBestSplit, MidpointBetweenAdjacentDoubles) {
  const double lo = 1.0;
  const double hi = std::nextafter(1.0, 2.0);
  const double t = detail::midpoint(lo, hi);
  EXPECT_LE(lo, t);
  EXPECT_LT(t, hi);
}

TEST(FindBestSplit, AgreesWithExhaustiveScan) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    const std::size_t distinct = 1 + rng.below(n);
    std::vector<double> x(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(distinct)) * 0.25 - 3.0;
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const auto got = find_best_split(x, y);
    const auto want = oracle::best_split(x, y);
    ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
    if (got) {
      ASSERT_EQ(got->threshold, want->threshold) << "trial " << trial;
      ASSERT_NEAR(got->impurity_decrease, want->decrease, 1e-12) << "trial " << trial;
    }
  }
}

}  // namespace
}  // namespace corf
