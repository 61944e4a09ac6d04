#include "corf/split.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "corf/error.hpp"

namespace corf {

double gini_impurity(ClassCounts counts) {
  if (counts.total() == 0) throw ContractError("gini impurity of a degenerate (empty) node");
  const double p = static_cast<double>(counts.ones) / static_cast<double>(counts.total());
  return 2.0 * p * (1.0 - p);
}

namespace detail {

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid < hi) ? mid : lo;
}

// The weighted child Gini is (2/m) * S with
//   S = l0*l1/nl + r0*r1/nr = (l0*l1*nr + r0*r1*nl) / (nl*nr),
// so minimizing S maximizes the decrease. S is kept as an exact fraction.
bool SplitScan::offer() {
  using u128 = uint128;
  const std::uint64_t nl = left_.total();
  const std::uint64_t m = parent_.total();
  if (nl == 0 || nl >= m) return false;
  const std::uint64_t nr = m - nl;
  const std::uint64_t r0 = parent_.zeros - left_.zeros;
  const std::uint64_t r1 = parent_.ones - left_.ones;
  const u128 num = u128(left_.zeros) * left_.ones * nr + u128(r0) * r1 * nl;
  const u128 den = u128(nl) * nr;
  if (!found_) {
    // Must beat the parent: S < c0*c1/m.
    if (num * m >= u128(parent_.zeros) * parent_.ones * den) return false;
  } else if (num * best_den_ >= best_num_ * den) {
    return false;
  }
  best_num_ = num;
  best_den_ = den;
  found_ = true;
  return true;
}

double SplitScan::best_decrease() const {
  const double m = static_cast<double>(parent_.total());
  const double parent = gini_impurity(parent_);
  const double s = static_cast<double>(best_num_) / static_cast<double>(best_den_);
  return parent - 2.0 * s / m;
}

}  // namespace detail

std::optional<Split> find_best_split(std::span<const double> x, std::span<const std::uint8_t> y) {
  CORF_REQUIRE(x.size() == y.size(), "find_best_split: x and y differ in length");
  CORF_REQUIRE(x.size() >= 2, "find_best_split: need at least two observations");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  ClassCounts parent;
  for (auto label : y) (label ? parent.ones : parent.zeros) += 1;

  detail::SplitScan scan(parent);
  std::optional<Split> best;
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = x[order[i]];
    std::uint64_t zeros = 0;
    std::uint64_t ones = 0;
    for (; i < order.size() && x[order[i]] == value; ++i) (y[order[i]] ? ones : zeros) += 1;
    scan.add(zeros, ones);
    if (i < order.size() && scan.offer()) {
      best = Split{detail::midpoint(value, x[order[i]]), 0.0};
    }
  }
  if (best) best->impurity_decrease = scan.best_decrease();
  return best;
}

}  // namespace corf
