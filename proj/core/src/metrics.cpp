#include "corf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "corf/error.hpp"

namespace corf {
namespace {

void check_pair(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  CORF_REQUIRE(scores.size() == labels.size(), "scores and labels differ in length");
  CORF_REQUIRE(!scores.empty(), "no scored samples");
  for (auto l : labels) CORF_REQUIRE(l <= 1, "labels must be 0/1");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_pair(scores, labels);
  for (double s : scores) CORF_REQUIRE(std::isfinite(s), "scores must be finite");
  const std::size_t n = scores.size();
  const auto n1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const std::size_t n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw InputError("AUC needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the midrank sum of positives keeps everything integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_midrank = static_cast<std::uint64_t>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) twice_rank_sum += twice_midrank;
    }
    i = j;
  }
  const double u = (static_cast<double>(twice_rank_sum) - static_cast<double>(n1) * static_cast<double>(n1 + 1)) / 2.0;
  return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

double brier_score(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_pair(scores, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CORF_REQUIRE(scores[i] >= 0.0 && scores[i] <= 1.0, "Brier score needs scores in [0, 1]");
    const double d = scores[i] - static_cast<double>(labels[i]);
    total += d * d;
  }
  return total / static_cast<double>(scores.size());
}

double error_rate(std::span<const double> scores, std::span<const std::uint8_t> labels, double cutoff) {
  check_pair(scores, labels);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::uint8_t predicted = scores[i] >= cutoff ? 1 : 0;
    if (predicted != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

namespace {

// Pairs within runs of equal values, sum of t(t-1)/2.
template <typename Equal>
std::int64_t tied_pairs(std::size_t n, Equal&& equal) {
  std::int64_t total = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal(i - 1, i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

// Stable merge sort of v counting inversions (strictly greater before smaller).
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t k = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      buf[k++] = v[b++];
      swaps += static_cast<std::int64_t>(mid - a);
    } else {
      buf[k++] = v[a++];
    }
  }
  while (a < mid) buf[k++] = v[a++];
  while (b < hi) buf[k++] = v[b++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  CORF_REQUIRE(x.size() == y.size(), "kendall_tau: vectors differ in length");
  CORF_REQUIRE(x.size() >= 2, "kendall_tau: need at least two observations");
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    CORF_REQUIRE(std::isfinite(x[i]) && std::isfinite(y[i]), "kendall_tau: non-finite value");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> ys(n);
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = x[order[k]];
    ys[k] = y[order[k]];
  }
  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
  const std::int64_t n3 =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && ys[a] == ys[b]; });
  std::vector<double> buf(n);
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
  if (n0 == n1 || n0 == n2) throw InputError("undefined correlation: a vector is entirely tied");
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

std::vector<std::size_t> rank_by_counts(std::span<const std::uint64_t> counts) {
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

std::vector<std::size_t> select_top_by_counts(std::span<const std::uint64_t> counts, std::size_t k) {
  CORF_REQUIRE(k >= 1 && k <= counts.size(), "selection size out of range");
  auto order = rank_by_counts(counts);
  order.resize(k);
  return order;
}

double mean_pairwise_overlap(const std::vector<std::vector<std::size_t>>& sets) {
  CORF_REQUIRE(sets.size() >= 2, "overlap needs at least two selections");
  const std::size_t s = sets.front().size();
  CORF_REQUIRE(s > 0, "overlap of empty selections");
  for (const auto& set : sets) CORF_REQUIRE(set.size() == s, "selections differ in size");
  std::vector<std::unordered_set<std::size_t>> lookup;
  lookup.reserve(sets.size());
  for (const auto& set : sets) lookup.emplace_back(set.begin(), set.end());
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      std::size_t shared = 0;
      for (auto idx : sets[b]) shared += lookup[a].count(idx);
      total += static_cast<double>(shared) / static_cast<double>(s);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

std::vector<double> selection_overlap(const std::vector<std::vector<std::size_t>>& rankings,
                                      std::span<const std::size_t> sizes) {
  std::vector<double> out;
  out.reserve(sizes.size());
  for (const std::size_t s : sizes) {
    std::vector<std::vector<std::size_t>> prefixes;
    prefixes.reserve(rankings.size());
    for (const auto& r : rankings) {
      CORF_REQUIRE(r.size() >= s, "ranking shorter than the requested selection size");
      prefixes.emplace_back(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(s));
    }
    out.push_back(mean_pairwise_overlap(prefixes));
  }
  return out;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_pair(scores, labels);
  const auto n1 = static_cast<double>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const double n0 = static_cast<double>(labels.size()) - n1;
  if (n1 == 0 || n0 == 0) throw InputError("ROC curve needs both classes");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == t; ++i) (labels[order[i]] ? tp : fp) += 1.0;
    curve.push_back({t, tp / n1, fp / n0});
  }
  return curve;
}

}  // namespace corf
