#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corf/error.hpp"
#include "corf/metrics.hpp"
#include "corf/random.hpp"
#include "oracles.hpp"

namespace corf {
namespace {

using Scores = std::vector<double>;
using Ys = std::vector<std::uint8_t>;

TEST(Auc, Examples) {
  EXPECT_DOUBLE_EQ(auc(Scores{0.9, 0.8, 0.2, 0.1}, Ys{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auc(Scores{0.9, 0.8, 0.2, 0.1}, Ys{1, 0, 1, 0}), 0.75);
  EXPECT_DOUBLE_EQ(auc(Scores{0.3, 0.3, 0.3, 0.3}, Ys{1, 0, 1, 0}), 0.5);
}

TEST(Auc, SingleClassIsAnError) { EXPECT_THROW(auc(Scores{0.1, 0.2}, Ys{1, 1}), InputError); }

TEST(Auc, MatchesPairCountingWithTies) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    Scores s(n);
    Ys y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(8)) / 8.0;
      y[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    ASSERT_NEAR(auc(s, y), oracle::auc(s, y), 1e-12) << "trial " << trial;
  }
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  Rng rng(32);
  Scores s(50);
  Ys y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    s[i] = rng.normal();
    y[i] = i % 3 == 0 ? 1 : 0;
  }
  Scores t(50);
  std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3.0 * v) + 7.0; });
  EXPECT_DOUBLE_EQ(auc(s, y), auc(t, y));
}

TEST(Auc, FlippedLabelsComplement) {
  Rng rng(33);
  Scores s(40);
  Ys y(40), f(40);
  for (std::size_t i = 0; i < 40; ++i) {
    s[i] = static_cast<double>(rng.below(5));
    y[i] = i % 2 ? 1 : 0;
    f[i] = 1 - y[i];
  }
  EXPECT_NEAR(auc(s, y) + auc(s, f), 1.0, 1e-12);
}

TEST(Brier, Examples) {
  EXPECT_DOUBLE_EQ(brier_score(Scores{1, 0}, Ys{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(brier_score(Scores{0.5, 0.5}, Ys{0, 1}), 0.25);
  EXPECT_DOUBLE_EQ(brier_score(Scores{0.5, 0.5}, Ys{1, 1}), 0.25);
  EXPECT_NEAR(brier_score(Scores{0.8, 0.3}, Ys{1, 0}), 0.065, 1e-15);
}

TEST(Brier, OutOfRangeScore) { EXPECT_THROW(brier_score(Scores{1.2}, Ys{1}), ContractError); }

TEST(ErrorRate, Examples) {
  EXPECT_DOUBLE_EQ(error_rate(Scores{0.9, 0.1}, Ys{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(error_rate(Scores{0.1, 0.9}, Ys{1, 0}), 1.0);
  EXPECT_NEAR(error_rate(Scores{0.6, 0.4, 0.5}, Ys{1, 0, 0}), 1.0 / 3.0, 1e-15);
}

TEST(ErrorRateAndBrier, PermutationInvariant) {
  Rng rng(34);
  Scores s(30);
  Ys y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    s[i] = rng.uniform();
    y[i] = rng.bernoulli(0.5);
  }
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 29; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  Scores ps(30);
  Ys py(30);
  for (std::size_t i = 0; i < 30; ++i) {
    ps[i] = s[perm[i]];
    py[i] = y[perm[i]];
  }
  EXPECT_DOUBLE_EQ(error_rate(s, y), error_rate(ps, py));
  EXPECT_NEAR(brier_score(s, y), brier_score(ps, py), 1e-15);
}

TEST(KendallTau, Examples) {
  EXPECT_DOUBLE_EQ(kendall_tau(Scores{1, 2, 3}, Scores{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(Scores{1, 2, 3}, Scores{3, 2, 1}), -1.0);
  EXPECT_NEAR(kendall_tau(Scores{1, 1, 2}, Scores{1, 2, 3}), 2.0 / std::sqrt(6.0), 1e-12);
}

TEST(KendallTau, AllTiedIsUndefined) {
  try {
    kendall_tau(Scores{4, 4, 4}, Scores{1, 2, 3});
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("undefined correlation"), std::string::npos);
  }
}

TEST(KendallTau, MatchesBruteForceWithTies) {
  Rng rng(35);
  int checked = 0;
  while (checked < 1000) {
    const std::size_t n = 2 + rng.below(40);
    Scores x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(6));
      y[i] = static_cast<double>(rng.below(4));
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) continue;
    ASSERT_NEAR(kendall_tau(x, y), oracle::kendall_tau(x, y), 1e-12) << "instance " << checked;
    ++checked;
  }
}

TEST(KendallTau, SymmetricAndAntisymmetric) {
  Rng rng(36);
  Scores x(25), y(25);
  for (std::size_t i = 0; i < 25; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] + rng.normal();
  }
  EXPECT_NEAR(kendall_tau(x, y), kendall_tau(y, x), 1e-15);
  Scores neg(25);
  std::transform(y.begin(), y.end(), neg.begin(), [](double v) { return -v; });
  EXPECT_NEAR(kendall_tau(x, neg), -kendall_tau(x, y), 1e-15);
}

TEST(SelectTop, Examples) {
  const std::vector<std::uint64_t> v{5, 1, 3};
  auto top = select_top_by_counts(v, 2);
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(select_top_by_counts(std::vector<std::uint64_t>{2, 2, 2}, 1), std::vector<std::size_t>{0});
}

TEST(SelectTop, OutOfRange) {
  const std::vector<std::uint64_t> v{1, 2};
  EXPECT_THROW(select_top_by_counts(v, 0), ContractError);
  EXPECT_THROW(select_top_by_counts(v, 3), ContractError);
}

TEST(SelectTop, MatchesFullSort) {
  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng.below(50);
    std::vector<std::uint64_t> v(p);
    for (auto& c : v) c = rng.below(6);
    const std::size_t k = 1 + rng.below(p);
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    idx.resize(k);
    ASSERT_EQ(select_top_by_counts(v, k), idx);
  }
}

TEST(SelectionOverlap, Examples) {
  std::vector<std::size_t> a(10), b(10);
  std::iota(a.begin(), a.end(), std::size_t{1});
  std::iota(b.begin(), b.end(), std::size_t{6});
  EXPECT_DOUBLE_EQ(mean_pairwise_overlap({a, a, a}), 1.0);
  std::vector<std::size_t> c(10);
  std::iota(c.begin(), c.end(), std::size_t{100});
  EXPECT_DOUBLE_EQ(mean_pairwise_overlap({a, c}), 0.0);
  EXPECT_DOUBLE_EQ(mean_pairwise_overlap({a, b}), 0.5);
}

TEST(SelectionOverlap, SizeMismatch) {
  EXPECT_THROW(mean_pairwise_overlap({{1, 2}, {1}}), ContractError);
}

TEST(SelectionOverlap, PrefixesOfRankings) {
  const std::vector<std::vector<std::size_t>> rankings{{0, 1, 2, 3}, {0, 2, 1, 3}, {3, 0, 1, 2}};
  const std::vector<std::size_t> sizes{1, 2};
  const auto o = selection_overlap(rankings, sizes);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_NEAR(o[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(o[1], (0.5 + 0.5 + 0.5) / 3.0, 1e-15);
}

TEST(RocCurve, MonotoneAndAnchored) {
  const auto roc = roc_curve(Scores{0.9, 0.8, 0.8, 0.3, 0.1}, Ys{1, 0, 1, 0, 1});
  ASSERT_EQ(roc.size(), 5u);
  EXPECT_TRUE(std::isinf(roc.front().threshold));
  EXPECT_EQ(roc.front().tpr, 0.0);
  EXPECT_EQ(roc.front().fpr, 0.0);
  EXPECT_EQ(roc.back().tpr, 1.0);
  EXPECT_EQ(roc.back().fpr, 1.0);
  for (std::size_t k = 1; k < roc.size(); ++k) {
    EXPECT_GE(roc[k].tpr, roc[k - 1].tpr);
    EXPECT_GE(roc[k].fpr, roc[k - 1].fpr);
    EXPECT_LT(roc[k].threshold, roc[k - 1].threshold);
  }
  EXPECT_NEAR(roc[2].tpr, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(roc[2].fpr, 0.5, 1e-15);
}

}  // namespace
}  // namespace corf
