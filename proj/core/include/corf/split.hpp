#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "corf/dataset.hpp"

namespace corf {

/// Two-class counts for a node or a candidate child.
struct ClassCounts {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;

  std::uint64_t total() const { return zeros + ones; }
};

/// Gini impurity 2p(1-p) with p the class-1 share. Throws ContractError on
/// an empty node.
double gini_impurity(ClassCounts counts);

struct Split {
  double threshold = 0.0;
  /// parent Gini minus the size-weighted Gini of the two children.
  double impurity_decrease = 0.0;
};

/// Best Gini split of y on x over all midpoints between consecutive distinct
/// sorted values. Samples with x <= threshold go left. Returns nullopt when
/// x is constant or no split strictly lowers impurity; equal decreases
/// resolve to the smallest threshold. Candidate scores are compared with
/// exact integer arithmetic so ties are real ties.
std::optional<Split> find_best_split(std::span<const double> x, std::span<const std::uint8_t> y);

namespace detail {

__extension__ using uint128 = unsigned __int128;

/// Split point between two adjacent distinct values, guaranteed to satisfy
/// lo <= t < hi.
double midpoint(double lo, double hi);

/// Incremental scan over groups of equal x in ascending order. Feed each
/// group's class counts with `add`; `score_boundary` evaluates the split
/// that puts everything added so far on the left.
class SplitScan {
 public:
  explicit SplitScan(ClassCounts parent) : parent_(parent) {}

  void add(std::uint64_t zeros, std::uint64_t ones) {
    left_.zeros += zeros;
    left_.ones += ones;
  }

  /// Empties the left side for the next candidate variable; the best
  /// boundary seen so far is kept, so earlier candidates win ties.
  void restart() { left_ = ClassCounts{}; }

  /// Compares the current boundary with the best seen; returns true if it
  /// is strictly better (and strictly better than not splitting).
  bool offer();

  bool found() const { return found_; }
  /// Gini decrease of the best boundary.
  double best_decrease() const;

 private:
  ClassCounts parent_;
  ClassCounts left_;
  // best child score as the fraction num/den, see split.cpp
  uint128 best_num_ = 0;
  uint128 best_den_ = 1;
  bool found_ = false;
};

}  // namespace detail
}  // namespace corf
