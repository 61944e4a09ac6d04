#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corf {

/// Exact Mann-Whitney AUC: (concordant + 0.5 tied) / (n1 * n0), computed from
/// midranks in O(n log n). Throws InputError when a class is missing.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Mean squared difference between score and label. Scores must lie in [0, 1].
double brier_score(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Share of samples whose predicted class (score >= cutoff means 1) differs
/// from the label.
double error_rate(std::span<const double> scores, std::span<const std::uint8_t> labels, double cutoff = 0.5);

/// Kendall tau-b with tie correction, O(n log n) (Knight's merge-sort count).
/// Throws InputError("undefined correlation") if either vector is all tied.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// All variable indices ordered by decreasing count, ties by ascending index.
std::vector<std::size_t> rank_by_counts(std::span<const std::uint64_t> counts);

/// The first k entries of rank_by_counts. Requires 1 <= k <= counts.size().
std::vector<std::size_t> select_top_by_counts(std::span<const std::uint64_t> counts, std::size_t k);

/// Mean over unordered pairs of |A intersect B| / s for sets of common size s.
double mean_pairwise_overlap(const std::vector<std::vector<std::size_t>>& sets);

/// For each size s, the mean pairwise overlap of the top-s prefixes of the
/// given rankings (each ranking must hold at least s entries).
std::vector<double> selection_overlap(const std::vector<std::vector<std::size_t>>& rankings,
                                      std::span<const std::size_t> sizes);

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Empirical ROC curve: one point per distinct score (descending), preceded
/// by the (0, 0) point at threshold +inf.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace corf
